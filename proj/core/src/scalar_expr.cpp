#include "dvbx/scalar_expr.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "dvbx/error.hpp"

namespace dvbx {

std::string FiberCoord::to_string(const Space* space) const {
    std::string name;
    if (space && alpha >= 0 && alpha < space->fiber_dim()) {
        name = space->variables[static_cast<std::size_t>(alpha)];
    } else {
        name = "x" + std::to_string(alpha + 1);
    }
    return name + offset.to_string();
}

std::string func_name(UnaryFunc f) {
    switch (f) {
        case UnaryFunc::Sin: return "sin";
        case UnaryFunc::Cos: return "cos";
        case UnaryFunc::Exp: return "exp";
        case UnaryFunc::Ln: return "ln";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Atom

Atom Atom::base_coord(int dir) {
    Atom a;
    a.kind_ = Kind::BaseCoord;
    a.base_dir_ = dir;
    return a;
}

Atom Atom::fiber(FiberCoord c) {
    Atom a;
    a.kind_ = Kind::Fiber;
    a.fiber_ = std::move(c);
    return a;
}

Atom Atom::symbol(std::string name) {
    Atom a;
    a.kind_ = Kind::Symbol;
    a.symbol_ = std::move(name);
    return a;
}

Atom Atom::function(UnaryFunc f, ScalarExpr arg) {
    Atom a;
    a.kind_ = Kind::Function;
    a.func_ = f;
    a.arg_ = std::make_shared<const ScalarExpr>(std::move(arg));
    return a;
}

int Atom::compare(const Atom& other) const {
    if (kind_ != other.kind_) return static_cast<int>(kind_) < static_cast<int>(other.kind_) ? -1 : 1;
    switch (kind_) {
        case Kind::BaseCoord:
            if (base_dir_ != other.base_dir_) return base_dir_ < other.base_dir_ ? -1 : 1;
            return 0;
        case Kind::Fiber:
            if (fiber_ != other.fiber_) return fiber_ < other.fiber_ ? -1 : 1;
            return 0;
        case Kind::Symbol:
            return symbol_.compare(other.symbol_) < 0 ? -1 : (symbol_ == other.symbol_ ? 0 : 1);
        case Kind::Function:
            if (func_ != other.func_) return static_cast<int>(func_) < static_cast<int>(other.func_) ? -1 : 1;
            return arg_->compare(*other.arg_);
    }
    return 0;
}

std::string Atom::to_string(const Space* space) const {
    switch (kind_) {
        case Kind::BaseCoord: return "n" + std::to_string(base_dir_ + 1);
        case Kind::Fiber: return fiber_.to_string(space);
        case Kind::Symbol: return symbol_;
        case Kind::Function: return func_name(func_) + "(" + arg_->to_string(space) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::vector<Factor> factors) : factors_(std::move(factors)) {
#ifndef NDEBUG
    for (std::size_t i = 0; i + 1 < factors_.size(); ++i)
        assert(factors_[i].first < factors_[i + 1].first);
    for (const auto& [a, e] : factors_) assert(e != 0);
#endif
}

Monomial Monomial::single(Atom a, int exp) {
    Monomial m;
    if (exp != 0) m.factors_.push_back({std::move(a), exp});
    return m;
}

Monomial Monomial::operator*(const Monomial& other) const {
    std::vector<Factor> out;
    out.reserve(factors_.size() + other.factors_.size());
    auto it = factors_.begin();
    auto jt = other.factors_.begin();
    while (it != factors_.end() && jt != other.factors_.end()) {
        int c = it->first.compare(jt->first);
        if (c < 0) {
            out.push_back(*it++);
        } else if (c > 0) {
            out.push_back(*jt++);
        } else {
            int e = it->second + jt->second;
            if (e != 0) out.push_back({it->first, e});
            ++it;
            ++jt;
        }
    }
    out.insert(out.end(), it, factors_.end());
    out.insert(out.end(), jt, other.factors_.end());
    Monomial m;
    m.factors_ = std::move(out);
    return m;
}

Monomial Monomial::inverse() const {
    Monomial m(*this);
    for (auto& [a, e] : m.factors_) e = -e;
    return m;
}

Monomial Monomial::pow(int e) const {
    if (e == 0) return unit();
    Monomial m(*this);
    for (auto& [a, ex] : m.factors_) ex *= e;
    return m;
}

int Monomial::compare(const Monomial& other) const {
    auto it = factors_.begin();
    auto jt = other.factors_.begin();
    while (it != factors_.end() && jt != other.factors_.end()) {
        int c = it->first.compare(jt->first);
        if (c != 0) return c;
        if (it->second != jt->second) return it->second < jt->second ? -1 : 1;
        ++it;
        ++jt;
    }
    if (it != factors_.end()) return 1;
    if (jt != other.factors_.end()) return -1;
    return 0;
}

long Monomial::fiber_degree() const {
    long d = 0;
    for (const auto& [a, e] : factors_)
        if (a.kind() == Atom::Kind::Fiber) d += e;
    return d;
}

std::string Monomial::to_string(const Space* space) const {
    if (factors_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [a, e] : factors_) {
        if (!first) os << "*";
        first = false;
        os << a.to_string(space);
        if (e != 1) {
            if (e < 0)
                os << "^(" << e << ")";
            else
                os << "^" << e;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// ScalarExpr

namespace {
const ScalarExpr::TermMap& empty_terms() {
    static const ScalarExpr::TermMap empty;
    return empty;
}
}  // namespace

ScalarExpr::ScalarExpr(Rational value) {
    if (!dvbx::is_zero(value)) {
        TermMap t;
        t.emplace(Monomial::unit(), std::move(value));
        terms_ = std::make_shared<const TermMap>(std::move(t));
    }
}

ScalarExpr ScalarExpr::base_coord(int dir) {
    return from_monomial(Monomial::single(Atom::base_coord(dir)));
}

ScalarExpr ScalarExpr::fiber(FiberCoord c) {
    return from_monomial(Monomial::single(Atom::fiber(std::move(c))));
}

ScalarExpr ScalarExpr::fiber(int alpha, MultiIndex offset) {
    return fiber(FiberCoord{alpha, std::move(offset)});
}

ScalarExpr ScalarExpr::symbol(std::string name) {
    return from_monomial(Monomial::single(Atom::symbol(std::move(name))));
}

ScalarExpr ScalarExpr::from_monomial(Monomial m, Rational coeff) {
    if (dvbx::is_zero(coeff)) return {};
    TermMap t;
    t.emplace(std::move(m), std::move(coeff));
    ScalarExpr e;
    e.terms_ = std::make_shared<const TermMap>(std::move(t));
    return e;
}

ScalarExpr ScalarExpr::from_terms(TermMap terms) {
    for (auto it = terms.begin(); it != terms.end();) {
        if (dvbx::is_zero(it->second))
            it = terms.erase(it);
        else
            ++it;
    }
    ScalarExpr e;
    if (!terms.empty()) e.terms_ = std::make_shared<const TermMap>(std::move(terms));
    return e;
}

const ScalarExpr::TermMap& ScalarExpr::terms() const {
    return terms_ ? *terms_ : empty_terms();
}

std::optional<Rational> ScalarExpr::as_constant() const {
    if (is_zero()) return Rational(0);
    if (terms().size() != 1) return std::nullopt;
    const auto& [m, c] = *terms().begin();
    if (!m.is_unit()) return std::nullopt;
    return c;
}

std::optional<std::pair<Monomial, Rational>> ScalarExpr::as_single_term() const {
    if (terms().size() != 1) return std::nullopt;
    return *terms().begin();
}

ScalarExpr ScalarExpr::operator-() const {
    TermMap t = terms();
    for (auto& [m, c] : t) c = -c;
    return from_terms(std::move(t));
}

ScalarExpr ScalarExpr::operator+(const ScalarExpr& other) const {
    if (is_zero()) return other;
    if (other.is_zero()) return *this;
    TermMap t = terms();
    for (const auto& [m, c] : other.terms()) {
        auto [it, inserted] = t.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (dvbx::is_zero(it->second)) t.erase(it);
        }
    }
    ScalarExpr e;
    if (!t.empty()) e.terms_ = std::make_shared<const TermMap>(std::move(t));
    return e;
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr& other) const { return *this + (-other); }

ScalarExpr ScalarExpr::operator*(const ScalarExpr& other) const {
    if (is_zero() || other.is_zero()) return {};
    TermMap t;
    for (const auto& [m1, c1] : terms()) {
        for (const auto& [m2, c2] : other.terms()) {
            Monomial m = m1 * m2;
            Rational c = c1 * c2;
            auto [it, inserted] = t.emplace(std::move(m), std::move(c));
            if (!inserted) {
                it->second += c1 * c2;
                if (dvbx::is_zero(it->second)) t.erase(it);
            }
        }
    }
    ScalarExpr e;
    if (!t.empty()) e.terms_ = std::make_shared<const TermMap>(std::move(t));
    return e;
}

ScalarExpr& ScalarExpr::operator+=(const ScalarExpr& other) { return *this = *this + other; }
ScalarExpr& ScalarExpr::operator-=(const ScalarExpr& other) { return *this = *this - other; }
ScalarExpr& ScalarExpr::operator*=(const ScalarExpr& other) { return *this = *this * other; }

ScalarExpr ScalarExpr::pow(int e) const {
    if (e == 0) return ScalarExpr(1);
    if (e > 0) {
        ScalarExpr acc(1);
        ScalarExpr base = *this;
        int k = e;
        while (k > 0) {
            if (k & 1) acc *= base;
            base *= base;
            k >>= 1;
        }
        return acc;
    }
    auto single = as_single_term();
    if (!single)
        throw Error(ErrorCode::NonInvertible,
                    "negative power of a non-monomial expression: " + to_string());
    const auto& [m, c] = *single;
    if (dvbx::is_zero(c)) throw Error(ErrorCode::DomainError, "negative power of zero");
    Rational cinv = Rational(1) / c;
    ScalarExpr inv = from_monomial(m.inverse(), cinv);
    return inv.pow(-e);
}

ScalarExpr ScalarExpr::operator/(const ScalarExpr& divisor) const {
    return *this * divisor.pow(-1);
}

int ScalarExpr::compare(const ScalarExpr& other) const {
    auto it = terms().begin();
    auto jt = other.terms().begin();
    while (it != terms().end() && jt != other.terms().end()) {
        int c = it->first.compare(jt->first);
        if (c != 0) return c;
        int s = cmp(it->second, jt->second);
        if (s != 0) return s;
        ++it;
        ++jt;
    }
    if (it != terms().end()) return 1;
    if (jt != other.terms().end()) return -1;
    return 0;
}

std::string ScalarExpr::to_string(const Space* space) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms()) {
        Rational a = c;
        if (first) {
            if (sgn(a) < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (sgn(a) < 0 ? " - " : " + ");
            if (sgn(a) < 0) a = -a;
        }
        if (m.is_unit()) {
            os << dvbx::to_string(a);
        } else if (dvbx::is_one(a)) {
            os << m.to_string(space);
        } else {
            os << dvbx::to_string(a) << "*" << m.to_string(space);
        }
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Functions

ScalarExpr apply_func(UnaryFunc f, const ScalarExpr& x) {
    if (auto c = x.as_constant()) {
        switch (f) {
            case UnaryFunc::Sin:
                if (dvbx::is_zero(*c)) return ScalarExpr(0);
                break;
            case UnaryFunc::Cos:
                if (dvbx::is_zero(*c)) return ScalarExpr(1);
                break;
            case UnaryFunc::Exp:
                if (dvbx::is_zero(*c)) return ScalarExpr(1);
                break;
            case UnaryFunc::Ln:
                if (dvbx::is_one(*c)) return ScalarExpr(0);
                if (sgn(*c) <= 0)
                    throw Error(ErrorCode::DomainError, "ln of non-positive constant " + dvbx::to_string(*c));
                break;
        }
    }
    return ScalarExpr::from_monomial(Monomial::single(Atom::function(f, x)));
}

ScalarExpr sin(const ScalarExpr& x) { return apply_func(UnaryFunc::Sin, x); }
ScalarExpr cos(const ScalarExpr& x) { return apply_func(UnaryFunc::Cos, x); }
ScalarExpr exp(const ScalarExpr& x) { return apply_func(UnaryFunc::Exp, x); }
ScalarExpr ln(const ScalarExpr& x) { return apply_func(UnaryFunc::Ln, x); }

// ---------------------------------------------------------------------------
// Calculus

namespace {

/// d(atom)/dc as an expression, or zero.
ScalarExpr atom_derivative(const Atom& a, const FiberCoord& c) {
    switch (a.kind()) {
        case Atom::Kind::BaseCoord:
        case Atom::Kind::Symbol:
            return {};
        case Atom::Kind::Fiber:
            return a.fiber_coord() == c ? ScalarExpr(1) : ScalarExpr();
        case Atom::Kind::Function: {
            ScalarExpr inner = partial(a.func_arg(), c);
            if (inner.is_zero()) return {};
            switch (a.func()) {
                case UnaryFunc::Sin: return cos(a.func_arg()) * inner;
                case UnaryFunc::Cos: return -(sin(a.func_arg()) * inner);
                case UnaryFunc::Exp: return exp(a.func_arg()) * inner;
                case UnaryFunc::Ln: {
                    // Needs 1/arg; only monomial arguments stay in the algebra.
                    return inner * a.func_arg().pow(-1);
                }
            }
            return {};
        }
    }
    return {};
}

}  // namespace

ScalarExpr partial(const ScalarExpr& f, const FiberCoord& c) {
    ScalarExpr result;
    for (const auto& [m, coeff] : f.terms()) {
        const auto& factors = m.factors();
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const auto& [a, e] = factors[i];
            ScalarExpr da = atom_derivative(a, c);
            if (da.is_zero()) continue;
            std::vector<Monomial::Factor> rest;
            rest.reserve(factors.size());
            for (std::size_t j = 0; j < factors.size(); ++j) {
                if (j == i) {
                    if (e != 1) rest.push_back({a, e - 1});
                } else {
                    rest.push_back(factors[j]);
                }
            }
            ScalarExpr term = ScalarExpr::from_monomial(Monomial(std::move(rest)),
                                                        coeff * make_rational(e));
            result += term * da;
        }
    }
    return result;
}

ScalarExpr shift(const ScalarExpr& f, const MultiIndex& K) {
    if (K.is_zero()) return f;
    ScalarExpr result;
    for (const auto& [m, coeff] : f.terms()) {
        ScalarExpr term{coeff};
        for (const auto& [a, e] : m.factors()) {
            switch (a.kind()) {
                case Atom::Kind::Fiber: {
                    FiberCoord c = a.fiber_coord();
                    c.offset = c.offset + K;
                    term *= ScalarExpr::from_monomial(Monomial::single(Atom::fiber(std::move(c)), e));
                    break;
                }
                case Atom::Kind::Symbol:
                    term *= ScalarExpr::from_monomial(Monomial::single(a, e));
                    break;
                case Atom::Kind::BaseCoord: {
                    int dir = a.base_dir();
                    int k = K[static_cast<std::size_t>(dir)];
                    if (k == 0) {
                        term *= ScalarExpr::from_monomial(Monomial::single(a, e));
                    } else if (e > 0) {
                        ScalarExpr shifted = ScalarExpr::base_coord(dir) + ScalarExpr(k);
                        term *= shifted.pow(e);
                    } else {
                        throw Error(ErrorCode::UnsupportedShift,
                                    "cannot shift negative power of base coordinate n" +
                                        std::to_string(dir + 1));
                    }
                    break;
                }
                case Atom::Kind::Function: {
                    ScalarExpr shifted_arg = shift(a.func_arg(), K);
                    term *= apply_func(a.func(), shifted_arg).pow(e);
                    break;
                }
            }
        }
        result += term;
    }
    return result;
}

namespace {

double eval_atom(const Atom& a, const EvalContext& ctx, const Space* space) {
    switch (a.kind()) {
        case Atom::Kind::BaseCoord: {
            auto dir = static_cast<std::size_t>(a.base_dir());
            if (dir >= ctx.base.size())
                throw Error(ErrorCode::MissingAssignment,
                            "no value for base coordinate n" + std::to_string(a.base_dir() + 1));
            return ctx.base[dir];
        }
        case Atom::Kind::Fiber: {
            auto it = ctx.fiber.find(a.fiber_coord());
            if (it == ctx.fiber.end())
                throw Error(ErrorCode::MissingAssignment,
                            "no value for fiber coordinate " + a.fiber_coord().to_string(space));
            return it->second;
        }
        case Atom::Kind::Symbol: {
            auto it = ctx.symbols.find(a.symbol_name());
            if (it == ctx.symbols.end())
                throw Error(ErrorCode::MissingAssignment, "no value for constant " + a.symbol_name());
            return it->second;
        }
        case Atom::Kind::Function: {
            double x = evaluate(a.func_arg(), ctx, space);
            switch (a.func()) {
                case UnaryFunc::Sin: return std::sin(x);
                case UnaryFunc::Cos: return std::cos(x);
                case UnaryFunc::Exp: return std::exp(x);
                case UnaryFunc::Ln:
                    if (x <= 0.0)
                        throw Error(ErrorCode::DomainError,
                                    "ln of non-positive value " + std::to_string(x));
                    return std::log(x);
            }
            return 0.0;
        }
    }
    return 0.0;
}

}  // namespace

double evaluate(const ScalarExpr& f, const EvalContext& ctx, const Space* space) {
    double sum = 0.0;
    for (const auto& [m, coeff] : f.terms()) {
        double prod = to_double(coeff);
        for (const auto& [a, e] : m.factors()) {
            double v = eval_atom(a, ctx, space);
            if (v == 0.0 && e < 0)
                throw Error(ErrorCode::DomainError, "division by zero while evaluating " +
                                                        a.to_string(space));
            prod *= std::pow(v, e);
        }
        sum += prod;
    }
    return sum;
}

namespace {

void collect_support(const ScalarExpr& f, std::set<FiberCoord>& out) {
    for (const auto& [m, c] : f.terms()) {
        for (const auto& [a, e] : m.factors()) {
            if (a.kind() == Atom::Kind::Fiber) {
                out.insert(a.fiber_coord());
            } else if (a.kind() == Atom::Kind::Function) {
                collect_support(a.func_arg(), out);
            }
        }
    }
}

}  // namespace

std::set<FiberCoord> fiber_support(const ScalarExpr& f) {
    std::set<FiberCoord> out;
    collect_support(f, out);
    return out;
}

bool is_fiber_polynomial(const ScalarExpr& f, std::string* offending) {
    for (const auto& [m, c] : f.terms()) {
        for (const auto& [a, e] : m.factors()) {
            if (a.kind() == Atom::Kind::Fiber && e < 0) {
                if (offending) *offending = a.to_string() + "^(" + std::to_string(e) + ")";
                return false;
            }
            if (a.kind() == Atom::Kind::Function && !fiber_support(a.func_arg()).empty()) {
                if (offending) *offending = a.to_string();
                return false;
            }
        }
    }
    return true;
}

}  // namespace dvbx
