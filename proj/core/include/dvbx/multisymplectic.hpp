#pragma once

#include <vector>

#include "dvbx/variational.hpp"

namespace dvbx {

/// First-order degenerate Lagrangian L^i_beta(n,u)·D_i u^beta − H(n,u).
/// Coefficients may depend on the base point but only on unshifted fiber
/// variables (enforced at construction).
class DegenerateLagrangian {
public:
    DegenerateLagrangian(Space space, std::vector<std::vector<ScalarExpr>> coefficients,
                         ScalarExpr hamiltonian);

    [[nodiscard]] const Space& space() const { return space_; }
    [[nodiscard]] const ScalarExpr& coefficient(int dir, int alpha) const {
        return coefficients_[static_cast<std::size_t>(dir)][static_cast<std::size_t>(alpha)];
    }
    [[nodiscard]] const ScalarExpr& hamiltonian() const { return hamiltonian_; }

    /// Expanded density Σ_{i,beta} L^i_beta (S_i u^beta − u^beta) − H.
    [[nodiscard]] ScalarExpr density() const;
    [[nodiscard]] LagrangianForm lagrangian() const { return {space_, density()}; }

private:
    Space space_;
    std::vector<std::vector<ScalarExpr>> coefficients_;  // [dir][alpha]
    ScalarExpr hamiltonian_;
};

/// η, ω = d_v η and the standard (0,2)-forms κ^i with ω = Σ κ^i ∧ co_vol(i).
struct MultisymplecticStructure {
    Form eta;
    Form omega;
    std::vector<Form> kappa;
};

struct StructuralIdentity {
    Form residual;          // d_h ω + d_v E^Δ(L); zero identically
    Form kappa_divergence;  // Σ_i D_{n^i} κ^i as a (0,2)-form
};

struct MultimomentumCandidate {
    VectorField generator;
    Form lambda;
    std::vector<ScalarExpr> components;  // λ^i
    bool is_momentum_map = false;        // d_v λ = v ⌟ ω
    bool is_conservation_law = false;    // d_h λ = v ⌟ E^Δ(L)
    ScalarExpr local_residual;           // Σ D_{n^i} λ^i − Q^alpha E_alpha
};

/// Euler–Lagrange system from the closed-form expression for this class.
SourceForm el_system(const DegenerateLagrangian& L);

/// η = Σ_i (S_i^{-1} L^i_alpha) d_v u^alpha ∧ co_vol(i), ω = d_v η and the
/// κ^i read off from ω; vertical closedness of each κ^i and the
/// reconstruction Σ κ^i ∧ co_vol(i) = ω are checked.
MultisymplecticStructure structure(const DegenerateLagrangian& L);

/// The off-solutions identity d_h ω + d_v E^Δ(L) = 0 plus the on-solution
/// divergence Σ D_{n^i} κ^i for inspection.
StructuralIdentity structural_identity(const DegenerateLagrangian& L);

/// λ = h_v(v ⌟ ω) with both multimomentum conditions checked; errors if
/// v ⌟ ω is not vertically closed.
MultimomentumCandidate multimomentum(const DegenerateLagrangian& L,
                                     std::vector<ScalarExpr> characteristics);

/// Re-checks both conditions for an arbitrary candidate λ.
bool verify_theorem(const MultimomentumCandidate& candidate, const DegenerateLagrangian& L);

}  // namespace dvbx
