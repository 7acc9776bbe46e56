#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dvbx/multi_index.hpp"
#include "dvbx/rational.hpp"
#include "dvbx/space.hpp"

namespace dvbx {

/// Index pair (alpha, J) naming the shifted dependent variable u^alpha_J.
/// The ordering is lexicographic on (alpha, offset) and is the canonical
/// order used wherever fiber coordinates must be sorted.
struct FiberCoord {
    int alpha = 0;  // 0-based dependent-variable index
    MultiIndex offset;

    auto operator<=>(const FiberCoord&) const = default;

    [[nodiscard]] std::string to_string(const Space* space = nullptr) const;
};

enum class UnaryFunc { Sin, Cos, Exp, Ln };

std::string func_name(UnaryFunc f);

class ScalarExpr;

/// One multiplicative factor: a base coordinate n^i, a fiber coordinate
/// u^alpha_J, a named constant, or a unary function of a nested expression.
class Atom {
public:
    enum class Kind { BaseCoord, Fiber, Symbol, Function };

    static Atom base_coord(int dir);
    static Atom fiber(FiberCoord c);
    static Atom symbol(std::string name);
    static Atom function(UnaryFunc f, ScalarExpr arg);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int base_dir() const { return base_dir_; }
    [[nodiscard]] const FiberCoord& fiber_coord() const { return fiber_; }
    [[nodiscard]] const std::string& symbol_name() const { return symbol_; }
    [[nodiscard]] UnaryFunc func() const { return func_; }
    [[nodiscard]] const ScalarExpr& func_arg() const { return *arg_; }

    [[nodiscard]] int compare(const Atom& other) const;
    bool operator<(const Atom& other) const { return compare(other) < 0; }
    bool operator==(const Atom& other) const { return compare(other) == 0; }

    [[nodiscard]] std::string to_string(const Space* space = nullptr) const;

private:
    Kind kind_ = Kind::Symbol;
    int base_dir_ = -1;
    FiberCoord fiber_{};
    std::string symbol_;
    UnaryFunc func_ = UnaryFunc::Sin;
    std::shared_ptr<const ScalarExpr> arg_;
};

/// Product of atom powers with integer (possibly negative) exponents,
/// kept sorted by atom; the empty product is 1.
class Monomial {
public:
    using Factor = std::pair<Atom, int>;

    Monomial() = default;
    explicit Monomial(std::vector<Factor> factors);  // must be sorted, exponents nonzero

    static Monomial unit() { return Monomial(); }
    static Monomial single(Atom a, int exp = 1);

    [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
    [[nodiscard]] bool is_unit() const { return factors_.empty(); }

    [[nodiscard]] Monomial operator*(const Monomial& other) const;
    [[nodiscard]] Monomial inverse() const;
    [[nodiscard]] Monomial pow(int e) const;

    [[nodiscard]] int compare(const Monomial& other) const;
    bool operator<(const Monomial& other) const { return compare(other) < 0; }
    bool operator==(const Monomial& other) const { return compare(other) == 0; }

    /// Total degree in fiber atoms (Laurent exponents included with sign).
    [[nodiscard]] long fiber_degree() const;

    [[nodiscard]] std::string to_string(const Space* space = nullptr) const;

private:
    std::vector<Factor> factors_;
};

/// Numeric evaluation environment.
struct EvalContext {
    std::vector<double> base;               // values of n^1..n^p (may be empty)
    std::map<FiberCoord, double> fiber;     // must cover the fiber support
    std::map<std::string, double> symbols;  // named constants
};

/// Exact symbolic scalar: a Q-linear combination of monomials, immutable and
/// always kept in normal form. Structural equality decides semantic equality
/// on the polynomial (and Laurent) fragment.
class ScalarExpr {
public:
    using TermMap = std::map<Monomial, Rational>;

    ScalarExpr() = default;  // zero
    ScalarExpr(long value) : ScalarExpr(make_rational(value)) {}  // NOLINT(google-explicit-constructor)
    ScalarExpr(Rational value);                                   // NOLINT(google-explicit-constructor)

    static ScalarExpr base_coord(int dir);
    static ScalarExpr fiber(FiberCoord c);
    static ScalarExpr fiber(int alpha, MultiIndex offset);
    static ScalarExpr symbol(std::string name);
    static ScalarExpr from_monomial(Monomial m, Rational coeff = Rational(1));
    static ScalarExpr from_terms(TermMap terms);

    [[nodiscard]] bool is_zero() const { return !terms_ || terms_->empty(); }
    [[nodiscard]] const TermMap& terms() const;

    /// Nonzero constant if the expression is a single rational number.
    [[nodiscard]] std::optional<Rational> as_constant() const;

    /// The single (monomial, coefficient) term if there is exactly one.
    [[nodiscard]] std::optional<std::pair<Monomial, Rational>> as_single_term() const;

    ScalarExpr operator-() const;
    ScalarExpr operator+(const ScalarExpr& other) const;
    ScalarExpr operator-(const ScalarExpr& other) const;
    ScalarExpr operator*(const ScalarExpr& other) const;
    ScalarExpr& operator+=(const ScalarExpr& other);
    ScalarExpr& operator-=(const ScalarExpr& other);
    ScalarExpr& operator*=(const ScalarExpr& other);

    /// Integer power; negative exponents require a single-term expression.
    [[nodiscard]] ScalarExpr pow(int e) const;

    /// Division; the divisor must normalize to a single term.
    ScalarExpr operator/(const ScalarExpr& divisor) const;

    [[nodiscard]] int compare(const ScalarExpr& other) const;
    bool operator==(const ScalarExpr& other) const { return compare(other) == 0; }
    bool operator<(const ScalarExpr& other) const { return compare(other) < 0; }

    [[nodiscard]] std::string to_string(const Space* space = nullptr) const;

private:
    std::shared_ptr<const TermMap> terms_;  // nullptr means zero
};

ScalarExpr sin(const ScalarExpr& x);
ScalarExpr cos(const ScalarExpr& x);
ScalarExpr exp(const ScalarExpr& x);
ScalarExpr ln(const ScalarExpr& x);
ScalarExpr apply_func(UnaryFunc f, const ScalarExpr& x);

/// Formal partial derivative treating each distinct u^alpha_J as independent.
ScalarExpr partial(const ScalarExpr& f, const FiberCoord& c);

/// Shift operator S_K: n^i -> n^i + K^i and u^alpha_J -> u^alpha_{J+K}.
ScalarExpr shift(const ScalarExpr& f, const MultiIndex& K);

double evaluate(const ScalarExpr& f, const EvalContext& ctx, const Space* space = nullptr);

/// All fiber coordinates appearing in f, including inside function arguments.
std::set<FiberCoord> fiber_support(const ScalarExpr& f);

/// True when f is polynomial in the fiber coordinates: no negative fiber
/// powers and no fiber coordinate inside a function argument. On failure,
/// offending receives a printable name for the first non-polynomial atom.
bool is_fiber_polynomial(const ScalarExpr& f, std::string* offending = nullptr);

}  // namespace dvbx
