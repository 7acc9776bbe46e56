#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dvbx/scalar_expr.hpp"
#include "dvbx/space.hpp"

namespace dvbx {

struct Bidegree {
    int k = 0;  // horizontal degree
    int l = 0;  // vertical degree
    auto operator<=>(const Bidegree&) const = default;
};

/// One exterior letter of a wedge monomial.
struct WedgeLetter {
    enum class Kind { Horizontal, Vertical };
    Kind kind;
    int dir = -1;        // Horizontal: 0-based direction
    FiberCoord coord{};  // Vertical

    static WedgeLetter horizontal(int d) { return {Kind::Horizontal, d, {}}; }
    static WedgeLetter vertical(FiberCoord c) { return {Kind::Vertical, -1, std::move(c)}; }

    [[nodiscard]] int compare(const WedgeLetter& other) const;
    bool operator<(const WedgeLetter& other) const { return compare(other) < 0; }
    bool operator==(const WedgeLetter& other) const { return compare(other) == 0; }
};

/// Canonical wedge monomial: all horizontal factors first (strictly
/// increasing directions), then vertical factors (strictly increasing fiber
/// coordinates). Construction from an unsorted letter sequence reports the
/// permutation sign, or zero for a repeated factor.
class WedgeMonomial {
public:
    WedgeMonomial() = default;  // the (0,0) monomial

    /// Canonicalize a letter sequence; returns the monomial and the sign,
    /// or std::nullopt if a factor repeats.
    static std::optional<std::pair<WedgeMonomial, int>> canonicalize(std::vector<WedgeLetter> letters);

    /// Build directly from already-canonical parts (asserted in debug).
    static WedgeMonomial from_parts(std::vector<int> horizontal, std::vector<FiberCoord> vertical);

    [[nodiscard]] const std::vector<int>& horizontal() const { return horizontal_; }
    [[nodiscard]] const std::vector<FiberCoord>& vertical() const { return vertical_; }
    [[nodiscard]] Bidegree bidegree() const {
        return {static_cast<int>(horizontal_.size()), static_cast<int>(vertical_.size())};
    }
    [[nodiscard]] int degree() const { return bidegree().k + bidegree().l; }

    [[nodiscard]] std::vector<WedgeLetter> letters() const;

    [[nodiscard]] int compare(const WedgeMonomial& other) const;
    bool operator<(const WedgeMonomial& other) const { return compare(other) < 0; }
    bool operator==(const WedgeMonomial& other) const { return compare(other) == 0; }

    [[nodiscard]] std::string to_string(const Space* space = nullptr) const;

private:
    std::vector<int> horizontal_;
    std::vector<FiberCoord> vertical_;
};

/// Dual frame vector: either ∂ along a base direction or along a fiber
/// coordinate. Pairings: base dual hits Δ^j only, fiber dual hits d_v u only.
struct FrameVector {
    enum class Kind { BaseDual, FiberDual };
    Kind kind;
    int dir = -1;
    FiberCoord coord{};

    static FrameVector base_dual(int d) { return {Kind::BaseDual, d, {}}; }
    static FrameVector fiber_dual(FiberCoord c) { return {Kind::FiberDual, -1, std::move(c)}; }
};

/// Element of the exterior algebra of (k,l)-forms with ScalarExpr
/// coefficients. Mixed bidegree is allowed; zero coefficients are dropped, so
/// a form is zero iff its term map is empty. Forms are immutable values; all
/// operations are pure.
class Form {
public:
    using TermMap = std::map<WedgeMonomial, ScalarExpr>;

    explicit Form(Space space) : space_(std::move(space)) {}

    static Form zero(Space space) { return Form(std::move(space)); }
    static Form scalar(Space space, ScalarExpr f);
    static Form term(Space space, WedgeMonomial m, ScalarExpr f);

    [[nodiscard]] const Space& space() const { return space_; }
    [[nodiscard]] const TermMap& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }

    /// Coefficient of a monomial (zero if absent).
    [[nodiscard]] ScalarExpr coefficient(const WedgeMonomial& m) const;

    void add_term(const WedgeMonomial& m, const ScalarExpr& f);

    Form operator+(const Form& other) const;
    Form operator-(const Form& other) const;
    Form operator-() const;
    Form& operator+=(const Form& other);
    Form& operator-=(const Form& other);

    /// Left multiplication by a scalar function.
    Form operator*(const ScalarExpr& f) const;

    [[nodiscard]] bool is_homogeneous(Bidegree* out = nullptr) const;
    [[nodiscard]] std::map<Bidegree, Form> homogeneous_components() const;

    bool operator==(const Form& other) const;

    [[nodiscard]] std::string to_string() const;

private:
    Space space_;
    TermMap terms_;
};

/// Graded-commutative wedge product; signatures must match.
Form wedge(const Form& a, const Form& b);

/// Interior product with a frame vector (degree −1 antiderivation).
Form interior(const FrameVector& x, const Form& sigma);

/// The volume form Δ^1∧...∧Δ^p.
Form vol(const Space& space);

/// co_vol(i) = ∂_{n^i} ⌟ vol (0-based direction).
Form co_vol(const Space& space, int dir);

void require_same_space(const Space& a, const Space& b, const char* what);

}  // namespace dvbx
