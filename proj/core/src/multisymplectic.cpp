#include "dvbx/multisymplectic.hpp"

#include <cassert>

#include "dvbx/error.hpp"
#include "dvbx/homotopy.hpp"
#include "dvbx/operators.hpp"

namespace dvbx {

namespace {

void require_unshifted(const ScalarExpr& f, const Space& space, const char* what) {
    for (const auto& c : fiber_support(f)) {
        if (!c.offset.is_zero())
            throw Error(ErrorCode::PreconditionFailed,
                        std::string(what) + " may only depend on unshifted fiber variables, found " +
                            c.to_string(&space));
    }
}

Form dv_u0(const Space& space, int alpha) {
    FiberCoord c{alpha, MultiIndex(static_cast<std::size_t>(space.base_dim))};
    return Form::term(space, WedgeMonomial::from_parts({}, {c}), ScalarExpr(1));
}

}  // namespace

DegenerateLagrangian::DegenerateLagrangian(Space space,
                                           std::vector<std::vector<ScalarExpr>> coefficients,
                                           ScalarExpr hamiltonian)
    : space_(std::move(space)),
      coefficients_(std::move(coefficients)),
      hamiltonian_(std::move(hamiltonian)) {
    if (coefficients_.size() != static_cast<std::size_t>(space_.base_dim))
        throw Error(ErrorCode::ConfigError, "need one coefficient row per base direction");
    for (auto& row : coefficients_) {
        if (row.size() != static_cast<std::size_t>(space_.fiber_dim()))
            throw Error(ErrorCode::ConfigError, "need one coefficient per dependent variable");
        for (auto& c : row) require_unshifted(c, space_, "degenerate Lagrangian coefficient");
    }
    require_unshifted(hamiltonian_, space_, "Hamiltonian");
}

ScalarExpr DegenerateLagrangian::density() const {
    ScalarExpr out;
    MultiIndex zero(static_cast<std::size_t>(space_.base_dim));
    for (int i = 0; i < space_.base_dim; ++i) {
        MultiIndex step = MultiIndex::unit(static_cast<std::size_t>(space_.base_dim),
                                           static_cast<std::size_t>(i));
        for (int a = 0; a < space_.fiber_dim(); ++a) {
            const auto& c = coefficient(i, a);
            if (c.is_zero()) continue;
            out += c * (ScalarExpr::fiber(a, step) - ScalarExpr::fiber(a, zero));
        }
    }
    return out - hamiltonian_;
}

SourceForm el_system(const DegenerateLagrangian& L) {
    const Space& space = L.space();
    const int p = space.base_dim;
    const int q = space.fiber_dim();
    MultiIndex zero(static_cast<std::size_t>(p));
    std::vector<ScalarExpr> comps(static_cast<std::size_t>(q));
    for (int alpha = 0; alpha < q; ++alpha) {
        FiberCoord ua{alpha, zero};
        ScalarExpr e;
        for (int i = 0; i < p; ++i) {
            MultiIndex step = MultiIndex::unit(static_cast<std::size_t>(p), static_cast<std::size_t>(i));
            for (int beta = 0; beta < q; ++beta) {
                ScalarExpr dL = partial(L.coefficient(i, beta), ua);
                if (dL.is_zero()) continue;
                e += dL * (ScalarExpr::fiber(beta, step) - ScalarExpr::fiber(beta, zero));
            }
            const auto& lia = L.coefficient(i, alpha);
            e += shift(lia, -step) - lia;
        }
        e -= partial(L.hamiltonian(), ua);
        comps[static_cast<std::size_t>(alpha)] = std::move(e);
    }
    return SourceForm(space, std::move(comps));
}

MultisymplecticStructure structure(const DegenerateLagrangian& L) {
    const Space& space = L.space();
    const int p = space.base_dim;

    Form eta(space);
    for (int i = 0; i < p; ++i) {
        MultiIndex step = MultiIndex::unit(static_cast<std::size_t>(p), static_cast<std::size_t>(i));
        for (int a = 0; a < space.fiber_dim(); ++a) {
            const auto& lia = L.coefficient(i, a);
            if (lia.is_zero()) continue;
            eta += wedge(dv_u0(space, a), co_vol(space, i)) * shift(lia, -step);
        }
    }
    Form omega = d_v(eta);

    // Read the κ^i off ω by the missing horizontal direction.
    std::vector<Form> kappa;
    kappa.reserve(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) kappa.emplace_back(space);
    for (const auto& [m, f] : omega.terms()) {
        int missing = -1;
        for (int i = 0, pos = 0; i < p; ++i) {
            if (pos < static_cast<int>(m.horizontal().size()) &&
                m.horizontal()[static_cast<std::size_t>(pos)] == i)
                ++pos;
            else
                missing = i;
        }
        assert(missing >= 0);
        ScalarExpr coeff = (missing % 2 == 1) ? -f : f;
        kappa[static_cast<std::size_t>(missing)].add_term(
            WedgeMonomial::from_parts({}, m.vertical()), coeff);
    }

    Form rebuilt(space);
    for (int i = 0; i < p; ++i) {
        if (!d_v(kappa[static_cast<std::size_t>(i)]).is_zero())
            throw Error(ErrorCode::VerificationFailed,
                        "standard (0,2)-form is not vertically closed");
        rebuilt += wedge(kappa[static_cast<std::size_t>(i)], co_vol(space, i));
    }
    if (!(rebuilt == omega))
        throw Error(ErrorCode::VerificationFailed, "kappa decomposition does not rebuild omega");

    return {std::move(eta), std::move(omega), std::move(kappa)};
}

StructuralIdentity structural_identity(const DegenerateLagrangian& L) {
    MultisymplecticStructure st = structure(L);
    SourceForm e = el_system(L);
    StructuralIdentity out{d_h(st.omega) + d_v(e.as_form()), Form(L.space())};
    out.kappa_divergence = Form(L.space());
    for (int i = 0; i < L.space().base_dim; ++i)
        out.kappa_divergence += lie_difference(st.kappa[static_cast<std::size_t>(i)], i);
    return out;
}

MultimomentumCandidate multimomentum(const DegenerateLagrangian& L,
                                     std::vector<ScalarExpr> characteristics) {
    const Space& space = L.space();
    VectorField v(space, std::move(characteristics));
    MultisymplecticStructure st = structure(L);
    Form contracted = contract(v, st.omega);
    Form closedness = d_v(contracted);
    if (!closedness.is_zero())
        throw Error(ErrorCode::NotClosed,
                    "contraction of the generator with omega is not vertically closed; "
                    "obstruction: " + closedness.to_string());

    Form lambda = contracted.is_zero() ? Form(space) : h_vertical(contracted);

    MultimomentumCandidate out{std::move(v), std::move(lambda), {}, false, false, ScalarExpr()};
    out.components = covol_components(out.lambda);
    out.is_momentum_map = (d_v(out.lambda) == contracted);

    SourceForm e = el_system(L);
    out.is_conservation_law = out.is_momentum_map && (d_h(out.lambda) == contract(out.generator, e.as_form()));

    for (int i = 0; i < space.base_dim; ++i) {
        MultiIndex step =
            MultiIndex::unit(static_cast<std::size_t>(space.base_dim), static_cast<std::size_t>(i));
        const auto& li = out.components[static_cast<std::size_t>(i)];
        out.local_residual += shift(li, step) - li;
    }
    for (int a = 0; a < space.fiber_dim(); ++a)
        out.local_residual -= out.generator.characteristics[static_cast<std::size_t>(a)] *
                              e.components[static_cast<std::size_t>(a)];
    return out;
}

bool verify_theorem(const MultimomentumCandidate& candidate, const DegenerateLagrangian& L) {
    MultisymplecticStructure st = structure(L);
    SourceForm e = el_system(L);
    bool momentum = (d_v(candidate.lambda) == contract(candidate.generator, st.omega));
    bool conservation = (d_h(candidate.lambda) == contract(candidate.generator, e.as_form()));
    return momentum && conservation;
}

}  // namespace dvbx
