#pragma once

#include <optional>
#include <vector>

#include "dvbx/form.hpp"
#include "dvbx/operators.hpp"

namespace dvbx {

/// Lagrangian (p,0)-form L(n,[u])·vol, stored by its density.
struct LagrangianForm {
    Space space;
    ScalarExpr density;

    LagrangianForm(Space s, ScalarExpr L) : space(std::move(s)), density(std::move(L)) {}

    [[nodiscard]] Form as_form() const { return vol(space) * density; }
};

/// Source form E_alpha d_v u^alpha ∧ vol: the fixed points of the interior
/// Euler projection in bidegree (p,1), stored by components.
struct SourceForm {
    Space space;
    std::vector<ScalarExpr> components;  // indexed by alpha

    SourceForm(Space s, std::vector<ScalarExpr> comps)
        : space(std::move(s)), components(std::move(comps)) {}

    [[nodiscard]] Form as_form() const;
    [[nodiscard]] bool is_zero() const;

    /// Validates the source-form shape and extracts components.
    static SourceForm from_form(const Form& f);
};

/// A (p−1,0)-form λ = λ^i ∂_{n^i}⌟vol together with its divergence bookkeeping.
struct ConservationLaw {
    Space space;
    Form lambda;
    std::vector<ScalarExpr> components;  // λ^i
    ScalarExpr divergence;               // Σ_i D_{n^i} λ^i
    ScalarExpr characteristic_pairing;   // Σ_alpha Q^alpha E_alpha
    bool verified = false;               // d_h λ == v ⌟ E^Δ(L), exact
};

struct SymmetryCheck {
    bool is_symmetry = false;
    ScalarExpr generator_applied;      // v(L)
    std::optional<Form> certificate;   // σ ∈ Ω^{p−1,0} with v ⌟ d_v L = d_h σ
};

/// Interior Euler projection on homogeneous (p,l)-forms, l ≥ 1:
/// (1/l) Σ_alpha d_v u^alpha ∧ Σ_J S_{−J}(∂/∂u^alpha_J ⌟ σ).
Form interior_euler(const Form& sigma);

/// E^Δ = I^Δ ∘ d_v, computed directly: E_alpha = Σ_J S_{−J}(∂L/∂u^alpha_J).
SourceForm euler_lagrange(const LagrangianForm& L);

/// δ_v^Δ = I^Δ ∘ d_v on fixed points of I^Δ; vanishing on a source form is
/// the Helmholtz condition for variationality.
Form delta_v(const Form& sigma);

/// τ with d_h τ = I^Δ(σ) − σ, built via the horizontal homotopy and verified
/// by re-substitution before returning.
Form boundary_term(const Form& sigma);

/// The extreme components of a (p−1,0)-form: λ = Σ_i λ^i ∂_{n^i}⌟vol.
std::vector<ScalarExpr> covol_components(const Form& lambda);

/// Assemble Σ_i F^i ∂_{n^i}⌟vol from components.
Form from_covol_components(const Space& space, const std::vector<ScalarExpr>& F);

/// Find F^1..F^p with Σ_i D_{n^i} F^i = f by an undetermined-coefficients
/// stencil solve over the rationals. The stencil radius starts at the radius
/// of f and grows to radius+2 before failing.
std::vector<ScalarExpr> divergence_invert(const Space& space, const ScalarExpr& f);

/// True iff v(L) is a null Lagrangian; the certificate σ satisfies
/// v ⌟ d_v L = d_h σ when the stencil solve can construct it.
SymmetryCheck is_variational_symmetry(const LagrangianForm& L, const VectorField& v);

/// Noether conservation law λ = σ − v ⌟ τ for a variational symmetry;
/// the identity d_h λ = v ⌟ E^Δ(L) is verified exactly.
ConservationLaw noether(const LagrangianForm& L, const VectorField& v);

}  // namespace dvbx
