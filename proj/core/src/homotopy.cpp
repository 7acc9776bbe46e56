#include "dvbx/homotopy.hpp"

#include <algorithm>
#include <cassert>

#include "dvbx/error.hpp"
#include "dvbx/operators.hpp"

namespace dvbx {

namespace {

VectorField scaling_field(const Space& space) {
    std::vector<ScalarExpr> q;
    q.reserve(static_cast<std::size_t>(space.fiber_dim()));
    MultiIndex zero(static_cast<std::size_t>(space.base_dim));
    for (int a = 0; a < space.fiber_dim(); ++a) q.push_back(ScalarExpr::fiber(a, zero));
    return VectorField(space, std::move(q));
}

void require_fiber_polynomial(const Form& sigma) {
    for (const auto& [m, f] : sigma.terms()) {
        std::string offending;
        if (!is_fiber_polynomial(f, &offending))
            throw Error(ErrorCode::NonPolynomial,
                        "vertical homotopy needs polynomial fiber dependence, found " + offending);
    }
}

Form h_vertical_homogeneous(const Form& sigma, int l) {
    assert(l >= 1);
    Form tau = contract(scaling_field(sigma.space()), sigma);
    Form out(sigma.space());
    for (const auto& [m, f] : tau.terms()) {
        long vertical = static_cast<long>(m.vertical().size());
        ScalarExpr::TermMap scaled;
        for (const auto& [mono, coeff] : f.terms()) {
            long degree = mono.fiber_degree() + vertical;
            assert(degree >= 1);  // contraction contributes one fiber factor
            scaled.emplace(mono, coeff / make_rational(degree));
        }
        out.add_term(m, ScalarExpr::from_terms(std::move(scaled)));
    }
    return out;
}

}  // namespace

Form h_vertical(const Form& sigma) {
    require_fiber_polynomial(sigma);
    Form out(sigma.space());
    for (const auto& [b, component] : sigma.homogeneous_components()) {
        if (b.l < 1)
            throw Error(ErrorCode::BidegreeError, "vertical homotopy needs l >= 1 components");
        out += h_vertical_homogeneous(component, b.l);
    }
    return out;
}

namespace {

/// Componentwise min over every fiber offset occurring in σ, letters and
/// coefficient supports alike.
MultiIndex min_offset(const Form& sigma) {
    MultiIndex lo(static_cast<std::size_t>(sigma.space().base_dim));
    auto fold = [&lo](const FiberCoord& c) {
        for (std::size_t i = 0; i < lo.dim(); ++i) lo[i] = std::min(lo[i], c.offset[i]);
    };
    for (const auto& [m, f] : sigma.terms()) {
        for (const auto& c : m.vertical()) fold(c);
        for (const auto& c : fiber_support(f)) fold(c);
    }
    return lo;
}

void require_nonnegative_stencil(const Form& sigma, const char* what) {
    if (!min_offset(sigma).all_nonnegative())
        throw Error(ErrorCode::NegativeOffset,
                    std::string(what) + " requires a stencil translated to non-negative offsets");
}

/// Componentwise max offset over the vertical letters carrying variable alpha.
std::optional<MultiIndex> max_letter_offset(const Form& sigma, int alpha) {
    std::optional<MultiIndex> hi;
    for (const auto& [m, f] : sigma.terms()) {
        for (const auto& c : m.vertical()) {
            if (c.alpha != alpha) continue;
            if (!hi) {
                hi = c.offset;
            } else {
                for (std::size_t i = 0; i < hi->dim(); ++i)
                    (*hi)[i] = std::max((*hi)[i], c.offset[i]);
            }
        }
    }
    return hi;
}

Form apply_s_minus_id(Form sigma, const MultiIndex& I) {
    for (std::size_t d = 0; d < I.dim(); ++d) {
        MultiIndex step = MultiIndex::unit(I.dim(), d);
        for (int rep = 0; rep < I[d]; ++rep) sigma = shift_form(sigma, step) - sigma;
    }
    return sigma;
}

Form dv_u0(const Space& space, int alpha) {
    FiberCoord c{alpha, MultiIndex(static_cast<std::size_t>(space.base_dim))};
    return Form::term(space, WedgeMonomial::from_parts({}, {c}), ScalarExpr(1));
}

Form h_horizontal_nonneg(const Form& sigma, const Bidegree& b) {
    const Space& space = sigma.space();
    const int p = space.base_dim;
    Form acc(space);
    for (int m = 0; m < p; ++m) {
        Form rho = interior(FrameVector::base_dual(m), sigma);
        if (rho.is_zero()) continue;
        for (int alpha = 0; alpha < space.fiber_dim(); ++alpha) {
            auto hi = max_letter_offset(rho, alpha);
            if (!hi) continue;
            // Enumerate I >= 0 with I + 1_m inside the support box.
            MultiIndex top = *hi - MultiIndex::unit(static_cast<std::size_t>(p),
                                                    static_cast<std::size_t>(m));
            if (!top.all_nonnegative()) continue;
            std::vector<int> counter(static_cast<std::size_t>(p), 0);
            for (;;) {
                MultiIndex I{std::vector<int>(counter)};
                Form f = f_operator(rho, alpha,
                                    I + MultiIndex::unit(static_cast<std::size_t>(p),
                                                         static_cast<std::size_t>(m)));
                if (!f.is_zero()) {
                    Form inner = wedge(dv_u0(space, alpha), f);
                    inner = apply_s_minus_id(std::move(inner), I);
                    Rational w = make_rational(I[static_cast<std::size_t>(m)] + 1) /
                                 make_rational(p - b.k + I.order() + 1);
                    acc += inner * ScalarExpr(w);
                }
                std::size_t d = 0;
                while (d < counter.size() && counter[d] == top[d]) {
                    counter[d] = 0;
                    ++d;
                }
                if (d == counter.size()) break;
                ++counter[d];
            }
        }
    }
    return acc * ScalarExpr(make_rational(1, b.l));
}

}  // namespace

Form f_operator(const Form& sigma, int alpha, const MultiIndex& J) {
    if (sigma.is_zero()) return sigma;
    require_nonnegative_stencil(sigma, "F operator");
    if (!J.all_nonnegative())
        throw Error(ErrorCode::NegativeOffset, "F operator needs J >= 0, got " + J.to_string());
    Form out(sigma.space());
    std::set<MultiIndex> offsets;
    for (const auto& [m, f] : sigma.terms())
        for (const auto& c : m.vertical())
            if (c.alpha == alpha && c.offset.contains(J)) offsets.insert(c.offset);
    for (const auto& I : offsets) {
        Form contracted = interior(FrameVector::fiber_dual(FiberCoord{alpha, I}), sigma);
        if (contracted.is_zero()) continue;
        out += shift_form(contracted, -I) * ScalarExpr(binomial(I, J));
    }
    return out;
}

namespace {

/// For a top-degree form Y (where d_h Y = 0 identically), returns P with
/// d_h P = S_K Y − Y, telescoping over unit steps via D_i X = d_h(∂_{n^i}⌟X).
Form staircase_potential(const Form& Y, const MultiIndex& K) {
    Form P(Y.space());
    Form cur = Y;
    for (std::size_t d = 0; d < K.dim(); ++d) {
        MultiIndex step = MultiIndex::unit(K.dim(), d);
        for (int rep = 0; rep < K[d]; ++rep) {
            P += interior(FrameVector::base_dual(static_cast<int>(d)), cur);
            cur = shift_form(cur, step);
        }
        for (int rep = 0; rep > K[d]; --rep) {
            Form next = shift_form(cur, -step);
            P -= interior(FrameVector::base_dual(static_cast<int>(d)), next);
            cur = std::move(next);
        }
    }
    return P;
}

}  // namespace

Form h_horizontal(const Form& sigma) {
    const Space& space = sigma.space();
    if (sigma.is_zero()) return sigma;
    Bidegree b;
    if (!sigma.is_homogeneous(&b) || b.k < 1 || b.k > space.base_dim || b.l < 1)
        throw Error(ErrorCode::BidegreeError,
                    "horizontal homotopy needs a homogeneous (k,l)-form, 1 <= k <= p, l >= 1");
    // Conjugate by a global shift so the appendix formulas see a
    // non-negative stencil.
    MultiIndex lo = min_offset(sigma);
    MultiIndex up(lo.dim());
    for (std::size_t i = 0; i < lo.dim(); ++i) up[i] = lo[i] < 0 ? -lo[i] : 0;
    Form translated = shift_form(sigma, up);
    Form result = shift_form(h_horizontal_nonneg(translated, b), -up);
    if (b.k == space.base_dim && !up.is_zero()) {
        // The interior Euler projection absorbs shifts (I ∘ S_K = I), so the
        // conjugated potential reaches σ − S_{−T} I(σ) instead of σ − I(σ);
        // a telescoping potential closes the gap.
        result += staircase_potential(interior_euler(translated), -up);
    }
    return result;
}

Form reconstruct_closed(const Form& sigma, ComplexDirection which) {
    const Space& space = sigma.space();
    if (sigma.is_zero()) return sigma;
    Bidegree b;
    if (!sigma.is_homogeneous(&b))
        throw Error(ErrorCode::BidegreeError, "reconstruction needs a homogeneous form");
    if (b.l < 1) throw Error(ErrorCode::BidegreeError, "reconstruction needs l >= 1");

    if (which == ComplexDirection::Vertical) {
        if (!d_v(sigma).is_zero())
            throw Error(ErrorCode::NotClosed, "form is not vertically closed");
        Form tau = h_vertical(sigma);
        if (!(d_v(tau) == sigma))
            throw Error(ErrorCode::VerificationFailed,
                        "vertical reconstruction residual: " + (d_v(tau) - sigma).to_string());
        return tau;
    }

    if (b.k == space.base_dim) {
        // At the right edge d_h vanishes identically; closedness in the
        // augmented row means a vanishing interior Euler projection.
        if (!interior_euler(sigma).is_zero())
            throw Error(ErrorCode::NotClosed,
                        "nonzero interior Euler projection certifies horizontal non-exactness");
    } else {
        if (!d_h(sigma).is_zero())
            throw Error(ErrorCode::NotClosed, "form is not horizontally closed");
        if (b.k == 0)
            throw Error(ErrorCode::NotClosed,
                        "nonzero horizontally closed (0,l)-forms admit no antiderivative");
    }
    Form tau = h_horizontal(sigma);
    if (!(d_h(tau) == sigma))
        throw Error(ErrorCode::VerificationFailed,
                    "horizontal reconstruction residual: " + (d_h(tau) - sigma).to_string());
    return tau;
}

Form edge_homotopy(const Form& sigma) {
    if (sigma.is_zero()) return sigma;
    Bidegree b;
    if (!sigma.is_homogeneous(&b) || b.l < 2)
        throw Error(ErrorCode::BidegreeError, "edge homotopy needs l >= 2");
    if (!(interior_euler(sigma) == sigma))
        throw Error(ErrorCode::NotAFixedPoint,
                    "edge homotopy input is not a fixed point of the interior Euler projection");
    return interior_euler(h_vertical(sigma));
}

LagrangianForm inverse_variational(const SourceForm& omega) {
    const Space& space = omega.space;
    Form w = omega.as_form();
    if (w.is_zero()) return LagrangianForm(space, ScalarExpr());
    Form obstruction = delta_v(w);
    if (!obstruction.is_zero())
        throw Error(ErrorCode::HelmholtzFailed,
                    "source form fails the Helmholtz condition: " + obstruction.to_string());
    Form lag = h_vertical(w);
    // lag is (p,0): its single monomial is vol.
    ScalarExpr density = lag.coefficient(vol(space).terms().begin()->first);
    LagrangianForm L(space, density);
    SourceForm back = euler_lagrange(L);
    if (!(back.as_form() == w))
        throw Error(ErrorCode::VerificationFailed,
                    "inverse variational round trip failed: " + (back.as_form() - w).to_string());
    return L;
}

}  // namespace dvbx
