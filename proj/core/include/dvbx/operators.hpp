#pragma once

#include <vector>

#include "dvbx/form.hpp"

namespace dvbx {

/// Vertical generalized vector field given by its characteristic
/// (Q^1,...,Q^q). Prolongation is implicit: contraction with d_v u^alpha_J
/// uses S_J Q^alpha, computed on demand.
struct VectorField {
    Space space;
    std::vector<ScalarExpr> characteristics;  // size q

    VectorField(Space s, std::vector<ScalarExpr> q)
        : space(std::move(s)), characteristics(std::move(q)) {}

    /// v applied to a scalar: sum over the prolonged frame.
    [[nodiscard]] ScalarExpr apply(const ScalarExpr& f) const;
};

/// S_K on forms: shifts coefficients and vertical factor indices; Δ factors
/// are shift-invariant.
Form shift_form(const Form& sigma, const MultiIndex& K);

/// Vertical derivative: raises l by one, new factor wedged on the left.
Form d_v(const Form& sigma);

/// Lie difference D_{n^i} = S_i - id.
Form lie_difference(const Form& sigma, int dir);

/// Exterior difference Σ_i Δ^i ∧ D_{n^i}; raises k by one.
Form d_h(const Form& sigma);

/// Exterior difference-derivative d_h + d_v; squares to zero.
Form d_total(const Form& sigma);

/// Interior product with the prolonged field of v.
Form contract(const VectorField& v, const Form& sigma);

/// Lie derivative by Cartan's formula: v ⌟ d_v σ + d_v (v ⌟ σ).
Form lie_derivative(const VectorField& v, const Form& sigma);

}  // namespace dvbx
