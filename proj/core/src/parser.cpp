#include "dvbx/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "dvbx/error.hpp"

namespace dvbx {

namespace {

class Parser {
public:
    Parser(const std::string& src, const Space& space) : src_(src), space_(space) {}

    ScalarExpr run() {
        skip_ws();
        ScalarExpr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& src_;
    const Space& space_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::ParseError, "parse error at " + std::to_string(line) + ":" +
                                               std::to_string(col) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    [[nodiscard]] char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            skip_ws();
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    long parse_integer() {
        bool neg = accept('-');
        if (!neg) accept('+');
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer");
        long v = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + (src_[pos_] - '0');
            ++pos_;
        }
        skip_ws();
        return neg ? -v : v;
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        skip_ws();
        return name;
    }

    ScalarExpr parse_expr() {
        ScalarExpr e = parse_term();
        for (;;) {
            if (accept('+'))
                e += parse_term();
            else if (accept('-'))
                e -= parse_term();
            else
                return e;
        }
    }

    ScalarExpr parse_term() {
        ScalarExpr e = parse_factor();
        for (;;) {
            if (accept('*')) {
                e *= parse_factor();
            } else if (accept('/')) {
                ScalarExpr d = parse_factor();
                try {
                    e = e / d;
                } catch (const Error& err) {
                    if (err.code() == ErrorCode::NonInvertible || err.code() == ErrorCode::DomainError)
                        fail(err.what());
                    throw;
                }
            } else {
                return e;
            }
        }
    }

    ScalarExpr parse_factor() {
        if (accept('-')) return -parse_factor();
        if (accept('+')) return parse_factor();
        return parse_power();
    }

    ScalarExpr parse_power() {
        ScalarExpr base = parse_primary();
        if (accept('^')) {
            long e;
            if (accept('(')) {
                e = parse_integer();
                expect(')');
            } else {
                e = parse_integer();
            }
            try {
                return base.pow(static_cast<int>(e));
            } catch (const Error& err) {
                fail(err.what());
            }
        }
        return base;
    }

    ScalarExpr parse_primary() {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long whole = parse_integer();
            if (peek() == '.') {
                ++pos_;
                long frac = 0, den = 1;
                if (!std::isdigit(static_cast<unsigned char>(peek())))
                    fail("expected digits after decimal point");
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    if (den > 100000000000000000L) fail("decimal literal too long");
                    frac = frac * 10 + (src_[pos_] - '0');
                    den *= 10;
                    ++pos_;
                }
                skip_ws();
                return ScalarExpr(make_rational(whole * den + frac, den));
            }
            return ScalarExpr(make_rational(whole));
        }
        if (c == '(') {
            ++pos_;
            skip_ws();
            ScalarExpr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name = parse_name();
            if ((name == "sin" || name == "cos" || name == "exp" || name == "ln") && peek() == '(') {
                ++pos_;
                skip_ws();
                ScalarExpr arg = parse_expr();
                expect(')');
                UnaryFunc f = name == "sin"   ? UnaryFunc::Sin
                              : name == "cos" ? UnaryFunc::Cos
                              : name == "exp" ? UnaryFunc::Exp
                                              : UnaryFunc::Ln;
                try {
                    return apply_func(f, arg);
                } catch (const Error& err) {
                    fail(err.what());
                }
            }
            return resolve_name(name);
        }
        fail("expected a number, name or '('");
    }

    ScalarExpr resolve_name(const std::string& name) {
        // Declared dependent variables take precedence over everything.
        for (int alpha = 0; alpha < space_.fiber_dim(); ++alpha) {
            if (space_.variables[static_cast<std::size_t>(alpha)] == name)
                return parse_fiber(alpha);
        }
        // n<digits> is a base coordinate.
        if (name.size() >= 2 && name[0] == 'n' &&
            std::all_of(name.begin() + 1, name.end(),
                        [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            int dir = std::atoi(name.c_str() + 1);
            if (dir < 1 || dir > space_.base_dim)
                fail("base coordinate " + name + " out of range for p=" +
                     std::to_string(space_.base_dim));
            return ScalarExpr::base_coord(dir - 1);
        }
        if (peek() == '[') fail("unknown variable '" + name + "'");
        return ScalarExpr::symbol(name);
    }

    ScalarExpr parse_fiber(int alpha) {
        MultiIndex offset(static_cast<std::size_t>(space_.base_dim));
        if (accept('[')) {
            for (std::size_t i = 0; i < offset.dim(); ++i) {
                if (i) expect(',');
                offset[i] = static_cast<int>(parse_integer());
            }
            expect(']');
        }
        return ScalarExpr::fiber(alpha, std::move(offset));
    }
};

}  // namespace

ScalarExpr parse_expr(const std::string& src, const Space& space) {
    return Parser(src, space).run();
}

}  // namespace dvbx
