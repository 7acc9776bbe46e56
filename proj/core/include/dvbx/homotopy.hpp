#pragma once

#include "dvbx/form.hpp"
#include "dvbx/variational.hpp"

namespace dvbx {

/// Vertical homotopy via the scaling flow: per monomial the λ-integral is a
/// rational rescaling by the total scaling degree. Satisfies
/// σ = d_v h_v(σ) + h_v(d_v σ). Coefficients must be polynomial in the fiber
/// variables; offending atoms (e.g. ln u) are reported by name.
Form h_vertical(const Form& sigma);

/// F_alpha^J(σ) = Σ_{I ⊇ J} binom(I,J) · S_{−I}(∂/∂u^alpha_I ⌟ σ).
/// The whole stencil of σ must sit at non-negative offsets.
Form f_operator(const Form& sigma, int alpha, const MultiIndex& J);

/// Horizontal homotopy on homogeneous (k,l)-forms, 1 ≤ k ≤ p, l ≥ 1.
/// For k ≤ p−1 it satisfies h(d_h σ) + d_h(h σ) = σ; at k = p the operative
/// identity is σ = I^Δ(σ) + d_h(h σ). Stencils are translated to the
/// non-negative cone internally and shifted back.
Form h_horizontal(const Form& sigma);

enum class ComplexDirection { Horizontal, Vertical };

/// Antiderivative of a closed form, verified by re-substitution:
/// d_v τ = σ (vertical) or d_h τ = σ (horizontal; at k = p closedness means
/// I^Δ σ = 0).
Form reconstruct_closed(const Form& sigma, ComplexDirection which);

/// Edge homotopy H^l = I^Δ ∘ h_v on fixed points of I^Δ (l ≥ 2).
Form edge_homotopy(const Form& sigma);

/// Inverse variational problem: for a source form with vanishing Helmholtz
/// obstruction, returns a Lagrangian with E^Δ(L) = ω, verified exactly.
LagrangianForm inverse_variational(const SourceForm& omega);

}  // namespace dvbx
