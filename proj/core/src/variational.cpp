#include "dvbx/variational.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "dvbx/error.hpp"
#include "dvbx/homotopy.hpp"

namespace dvbx {

namespace {

Form dv_u(const Space& space, int alpha) {
    FiberCoord c{alpha, MultiIndex(static_cast<std::size_t>(space.base_dim))};
    return Form::term(space, WedgeMonomial::from_parts({}, {c}), ScalarExpr(1));
}

}  // namespace

Form SourceForm::as_form() const {
    Form out(space);
    for (int alpha = 0; alpha < space.fiber_dim(); ++alpha) {
        const auto& e = components[static_cast<std::size_t>(alpha)];
        if (e.is_zero()) continue;
        out += wedge(dv_u(space, alpha), vol(space)) * e;
    }
    return out;
}

bool SourceForm::is_zero() const {
    return std::all_of(components.begin(), components.end(),
                       [](const ScalarExpr& e) { return e.is_zero(); });
}

SourceForm SourceForm::from_form(const Form& f) {
    const Space& space = f.space();
    std::vector<ScalarExpr> comps(static_cast<std::size_t>(space.fiber_dim()));
    MultiIndex zero(static_cast<std::size_t>(space.base_dim));
    for (const auto& [m, coeff] : f.terms()) {
        Bidegree b = m.bidegree();
        if (b.k != space.base_dim || b.l != 1)
            throw Error(ErrorCode::BidegreeError, "source form must have bidegree (p,1)");
        const FiberCoord& c = m.vertical().front();
        if (!(c.offset == zero))
            throw Error(ErrorCode::NotAFixedPoint,
                        "source form may only contain unshifted vertical factors, found dv " +
                            c.to_string(&space));
        // Canonical monomial is vol ∧ dv u^alpha; undo the sign of moving the
        // vertical factor past p horizontal ones.
        ScalarExpr e = (space.base_dim % 2 == 1) ? -coeff : coeff;
        comps[static_cast<std::size_t>(c.alpha)] += e;
    }
    return SourceForm(space, std::move(comps));
}

Form interior_euler(const Form& sigma) {
    const Space& space = sigma.space();
    if (sigma.is_zero()) return sigma;
    Bidegree b;
    if (!sigma.is_homogeneous(&b) || b.k != space.base_dim || b.l < 1)
        throw Error(ErrorCode::BidegreeError,
                    "interior Euler projection needs a homogeneous (p,l)-form with l >= 1");

    // Union of vertical letters over all monomials.
    std::set<FiberCoord> letters;
    for (const auto& [m, f] : sigma.terms())
        for (const auto& c : m.vertical()) letters.insert(c);

    Form acc(space);
    for (const auto& c : letters) {
        Form contracted = interior(FrameVector::fiber_dual(c), sigma);
        if (contracted.is_zero()) continue;
        acc += wedge(dv_u(space, c.alpha), shift_form(contracted, -c.offset));
    }
    return acc * ScalarExpr(make_rational(1, b.l));
}

SourceForm euler_lagrange(const LagrangianForm& L) {
    const Space& space = L.space;
    std::vector<ScalarExpr> comps(static_cast<std::size_t>(space.fiber_dim()));
    for (const auto& c : fiber_support(L.density)) {
        ScalarExpr d = partial(L.density, c);
        if (d.is_zero()) continue;
        comps[static_cast<std::size_t>(c.alpha)] += shift(d, -c.offset);
    }
    return SourceForm(space, std::move(comps));
}

Form delta_v(const Form& sigma) {
    if (sigma.is_zero()) return sigma;
    Form projected = interior_euler(sigma);
    if (!(projected == sigma))
        throw Error(ErrorCode::NotAFixedPoint,
                    "delta_v input is not a fixed point of the interior Euler projection");
    return interior_euler(d_v(sigma));
}

Form boundary_term(const Form& sigma) {
    const Space& space = sigma.space();
    if (sigma.is_zero()) return sigma;
    Bidegree b;
    if (!sigma.is_homogeneous(&b) || b.k != space.base_dim || b.l < 1)
        throw Error(ErrorCode::BidegreeError, "boundary term needs a homogeneous (p,l)-form, l >= 1");
    Form tau = -h_horizontal(sigma);
    Form residual = d_h(tau) - (interior_euler(sigma) - sigma);
    if (!residual.is_zero())
        throw Error(ErrorCode::VerificationFailed,
                    "boundary term verification left a nonzero residual: " + residual.to_string());
    return tau;
}

std::vector<ScalarExpr> covol_components(const Form& lambda) {
    const Space& space = lambda.space();
    int p = space.base_dim;
    std::vector<ScalarExpr> out(static_cast<std::size_t>(p));
    for (const auto& [m, f] : lambda.terms()) {
        Bidegree b = m.bidegree();
        if (b.l != 0 || b.k != p - 1)
            throw Error(ErrorCode::BidegreeError, "expected a (p-1,0)-form");
        // Find the missing direction.
        int missing = -1;
        for (int i = 0, pos = 0; i < p; ++i) {
            if (pos < static_cast<int>(m.horizontal().size()) &&
                m.horizontal()[static_cast<std::size_t>(pos)] == i) {
                ++pos;
            } else {
                missing = i;
            }
        }
        assert(missing >= 0);
        // co_vol(i) = (−1)^i Δ^{all but i}; invert that sign.
        ScalarExpr coeff = (missing % 2 == 1) ? -f : f;
        out[static_cast<std::size_t>(missing)] += coeff;
    }
    return out;
}

Form from_covol_components(const Space& space, const std::vector<ScalarExpr>& F) {
    Form out(space);
    for (int i = 0; i < space.base_dim; ++i)
        out += co_vol(space, i) * F[static_cast<std::size_t>(i)];
    return out;
}

// ---------------------------------------------------------------------------
// Divergence inversion by undetermined coefficients

namespace {

/// Componentwise max |offset| over the fiber support plus per-direction base
/// degrees; this is the stencil radius fed to the ansatz.
int stencil_radius(const ScalarExpr& f) {
    int r = 0;
    for (const auto& c : fiber_support(f))
        for (std::size_t i = 0; i < c.offset.dim(); ++i)
            r = std::max(r, std::abs(c.offset[i]));
    return r;
}

/// Max degree of any base coordinate across monomials (function atoms with
/// base dependence are treated as opaque and contribute nothing here).
int base_degree(const ScalarExpr& f) {
    int d = 0;
    for (const auto& [m, c] : f.terms())
        for (const auto& [a, e] : m.factors())
            if (a.kind() == Atom::Kind::BaseCoord && e > 0) d = std::max(d, e);
    return d;
}

/// Exact dense solve of A x = b; returns any particular solution or nullopt.
std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> A,
                                                 std::vector<Rational> b) {
    const std::size_t rows = A.size();
    const std::size_t cols = rows ? A[0].size() : 0;
    std::vector<std::size_t> pivot_col_of_row;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && is_zero(A[piv][c])) ++piv;
        if (piv == rows) continue;
        std::swap(A[piv], A[r]);
        std::swap(b[piv], b[r]);
        Rational inv = Rational(1) / A[r][c];
        for (std::size_t j = c; j < cols; ++j) A[r][j] *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || is_zero(A[i][c])) continue;
            Rational factor = A[i][c];
            for (std::size_t j = c; j < cols; ++j) A[i][j] -= factor * A[r][j];
            b[i] -= factor * b[r];
        }
        pivot_col_of_row.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (!is_zero(b[i])) return std::nullopt;  // inconsistent
    std::vector<Rational> x(cols, Rational(0));
    for (std::size_t i = 0; i < pivot_col_of_row.size(); ++i) x[pivot_col_of_row[i]] = b[i];
    return x;
}

}  // namespace

std::vector<ScalarExpr> divergence_invert(const Space& space, const ScalarExpr& f) {
    const int p = space.base_dim;
    std::vector<ScalarExpr> F(static_cast<std::size_t>(p));
    if (f.is_zero()) return F;

    {
        // Precondition: f is a null Lagrangian.
        SourceForm e = euler_lagrange(LagrangianForm(space, f));
        if (!e.is_zero())
            throw Error(ErrorCode::PreconditionFailed,
                        "divergence inversion requires a null Lagrangian; E^ of the input is " +
                            e.as_form().to_string());
    }

    const int r0 = stencil_radius(f);
    for (int radius = r0; radius <= r0 + 2; ++radius) {
        // Candidate monomials: strip base powers from every monomial of every
        // backward shift of f, then re-dress with base monomials one degree
        // above what f carries.
        std::set<Monomial> fiber_parts;
        std::vector<MultiIndex> box;
        {
            MultiIndex K(static_cast<std::size_t>(p));
            // enumerate K in [0, radius]^p
            std::size_t total = 1;
            for (int i = 0; i < p; ++i) total *= static_cast<std::size_t>(radius) + 1;
            for (std::size_t idx = 0; idx < total; ++idx) {
                std::size_t t = idx;
                for (int i = 0; i < p; ++i) {
                    K[static_cast<std::size_t>(i)] = static_cast<int>(t % (radius + 1));
                    t /= static_cast<std::size_t>(radius) + 1;
                }
                box.push_back(K);
            }
        }
        for (const auto& K : box) {
            ScalarExpr g = shift(f, -K);
            for (const auto& [m, c] : g.terms()) {
                std::vector<Monomial::Factor> nonbase;
                for (const auto& [a, e] : m.factors())
                    if (a.kind() != Atom::Kind::BaseCoord) nonbase.push_back({a, e});
                fiber_parts.insert(Monomial(std::move(nonbase)));
            }
        }
        // Base-coordinate dressings up to degree (deg_i f) + 1 per direction.
        const int bd = base_degree(f) + 1;
        std::vector<Monomial> dressings;
        {
            std::vector<int> degs(static_cast<std::size_t>(p), 0);
            for (;;) {
                std::vector<Monomial::Factor> fac;
                for (int i = 0; i < p; ++i)
                    if (degs[static_cast<std::size_t>(i)] > 0)
                        fac.push_back({Atom::base_coord(i), degs[static_cast<std::size_t>(i)]});
                dressings.push_back(Monomial(std::move(fac)));
                int i = 0;
                while (i < p && degs[static_cast<std::size_t>(i)] == bd) {
                    degs[static_cast<std::size_t>(i)] = 0;
                    ++i;
                }
                if (i == p) break;
                ++degs[static_cast<std::size_t>(i)];
            }
        }
        std::set<Monomial> candidates;
        for (const auto& fp : fiber_parts)
            for (const auto& d : dressings) candidates.insert(fp * d);

        // Columns: (direction, candidate). Column expression: S_i m − m.
        // Candidates free of base coordinates go first so that pivoting
        // prefers the plain telescoping solution over an n-dressed one.
        std::vector<Monomial> ordered(candidates.begin(), candidates.end());
        std::stable_sort(ordered.begin(), ordered.end(), [](const Monomial& a, const Monomial& b) {
            auto base_deg = [](const Monomial& m) {
                int d = 0;
                for (const auto& [atom, e] : m.factors())
                    if (atom.kind() == Atom::Kind::BaseCoord) d += e > 0 ? e : -e;
                return d;
            };
            return base_deg(a) < base_deg(b);
        });
        std::vector<ScalarExpr> columns;
        std::vector<std::pair<int, Monomial>> column_keys;
        for (const auto& m : ordered) {
            for (int i = 0; i < p; ++i) {
                MultiIndex step = MultiIndex::unit(static_cast<std::size_t>(p), static_cast<std::size_t>(i));
                ScalarExpr me = ScalarExpr::from_monomial(m);
                ScalarExpr col = shift(me, step) - me;
                if (col.is_zero()) continue;
                columns.push_back(std::move(col));
                column_keys.push_back({i, m});
            }
        }

        // Rows: every monomial appearing in any column or in f.
        std::map<Monomial, std::size_t> row_of;
        auto row_index = [&row_of](const Monomial& m) {
            auto [it, inserted] = row_of.emplace(m, row_of.size());
            return it->second;
        };
        for (const auto& [m, c] : f.terms()) row_index(m);
        for (const auto& col : columns)
            for (const auto& [m, c] : col.terms()) row_index(m);

        std::vector<std::vector<Rational>> A(row_of.size(),
                                             std::vector<Rational>(columns.size(), Rational(0)));
        std::vector<Rational> b(row_of.size(), Rational(0));
        for (const auto& [m, c] : f.terms()) b[row_of.at(m)] = c;
        for (std::size_t j = 0; j < columns.size(); ++j)
            for (const auto& [m, c] : columns[j].terms()) A[row_of.at(m)][j] = c;

        auto x = solve_exact(std::move(A), std::move(b));
        if (!x) continue;

        for (std::size_t j = 0; j < column_keys.size(); ++j) {
            if (is_zero((*x)[j])) continue;
            auto& [dir, m] = column_keys[j];
            F[static_cast<std::size_t>(dir)] += ScalarExpr::from_monomial(m, (*x)[j]);
        }
        // Exactness of the solve makes re-substitution a cheap assert.
        ScalarExpr check;
        for (int i = 0; i < p; ++i) {
            MultiIndex step = MultiIndex::unit(static_cast<std::size_t>(p), static_cast<std::size_t>(i));
            check += shift(F[static_cast<std::size_t>(i)], step) - F[static_cast<std::size_t>(i)];
        }
        if (!(check == f))
            throw Error(ErrorCode::VerificationFailed, "divergence inversion re-substitution failed");
        return F;
    }
    throw Error(ErrorCode::AnsatzInsufficient,
                "no stencil of radius up to " + std::to_string(r0 + 2) +
                    " inverts the divergence of " + f.to_string(&space));
}

SymmetryCheck is_variational_symmetry(const LagrangianForm& L, const VectorField& v) {
    require_same_space(L.space, v.space, "variational symmetry check");
    SymmetryCheck out;
    out.generator_applied = v.apply(L.density);
    SourceForm e = euler_lagrange(LagrangianForm(L.space, out.generator_applied));
    out.is_symmetry = e.is_zero();
    if (!out.is_symmetry) return out;
    try {
        out.certificate = from_covol_components(L.space, divergence_invert(L.space, out.generator_applied));
    } catch (const Error& err) {
        if (err.code() != ErrorCode::AnsatzInsufficient) throw;
    }
    return out;
}

ConservationLaw noether(const LagrangianForm& L, const VectorField& v) {
    SymmetryCheck sym = is_variational_symmetry(L, v);
    if (!sym.is_symmetry)
        throw Error(ErrorCode::PreconditionFailed,
                    "characteristic is not a variational symmetry: E^ of v(L) = " +
                        euler_lagrange(LagrangianForm(L.space, sym.generator_applied))
                            .as_form()
                            .to_string());
    if (!sym.certificate)
        throw Error(ErrorCode::AnsatzInsufficient,
                    "variational symmetry certificate could not be constructed");

    Form tau = boundary_term(d_v(L.as_form()));
    Form lambda = *sym.certificate - contract(v, tau);

    SourceForm e = euler_lagrange(L);
    Form lhs = d_h(lambda);
    Form rhs = contract(v, e.as_form());
    bool verified = (lhs == rhs);
    if (!verified)
        throw Error(ErrorCode::VerificationFailed,
                    "conservation-law identity left a residual: " + (lhs - rhs).to_string());

    ConservationLaw law{L.space, lambda, covol_components(lambda), ScalarExpr(), ScalarExpr(), verified};
    for (int i = 0; i < L.space.base_dim; ++i) {
        MultiIndex step =
            MultiIndex::unit(static_cast<std::size_t>(L.space.base_dim), static_cast<std::size_t>(i));
        const auto& li = law.components[static_cast<std::size_t>(i)];
        law.divergence += shift(li, step) - li;
    }
    for (int a = 0; a < L.space.fiber_dim(); ++a)
        law.characteristic_pairing += v.characteristics[static_cast<std::size_t>(a)] *
                                      e.components[static_cast<std::size_t>(a)];
    return law;
}

}  // namespace dvbx
