#pragma once

#include <map>
#include <string>
#include <vector>

#include "dvbx/mesh.hpp"
#include "dvbx/random_forms.hpp"
#include "dvbx/scalar_expr.hpp"

namespace dvbx {

/// Per-field storage over the mesh: all fields are integer-indexed arrays;
/// half-integer staggering is site metadata carried by the spec.
class FieldGrid {
public:
    FieldGrid(std::size_t nx, int j_first, int j_last);

    [[nodiscard]] bool has_level(int j) const { return j >= j_first_ && j <= j_last_; }
    [[nodiscard]] int first_level() const { return j_first_; }
    [[nodiscard]] int last_level() const { return j_last_; }

    double& at(long i, int j);
    [[nodiscard]] double at(long i, int j) const;

private:
    std::size_t nx_;
    int j_first_;
    int j_last_;
    std::vector<double> data_;
};

struct FieldSpec {
    std::string name;
    double x_stagger = 0.0;  // physical site is (x_i + x_stagger*hx_i, ...)
    double t_stagger = 0.0;
    int first_level = 0;  // physical time index of the initial layer
};

struct SchemeEquation {
    std::string name;
    ScalarExpr residual;  // offsets relative to the base node (i,j); must be linear in target
    FiberCoord target;    // (alpha, (0, dj)) with dj in {0,1}
};

/// One coefficient × dv(a) ∧ dv(b) term of a printed (0,2)-form component.
struct KappaTerm {
    ScalarExpr coefficient;
    FiberCoord a, b;
};

struct StencilScheme {
    std::string name;
    Space space;  // p = 2 (x,t); q = number of fields
    std::vector<FieldSpec> fields;
    std::vector<SchemeEquation> equations;
    std::map<std::string, double> params;   // bound as symbols in every evaluation
    std::vector<KappaTerm> kappa_t;         // Δ^x component of the scheme's ω
    std::vector<KappaTerm> kappa_x;         // Δ^t component
};

/// Störmer–Verlet discretization of the semilinear wave system; `potential`
/// is V(u) over the scheme space (plain `u` parses as u[0,0]).
StencilScheme make_wave_scheme(const ScalarExpr& potential, double eps);

/// Euler box scheme for the Zakharov system.
StencilScheme make_zakharov_scheme();

enum class BoundaryCondition { Periodic, Dirichlet };

struct SweepPlan {
    std::vector<std::size_t> order;
    bool needs_fixed_point = false;
};

struct Trajectory {
    std::vector<FieldGrid> fields;  // indexed by alpha
};

struct MsResidualStats {
    std::vector<double> per_level_max;  // indexed by sweep level
    std::vector<double> per_level_l2;
    double max_abs = 0.0;
    double scale = 0.0;  // max |hx κ^t|, |ht κ^x| seen
    [[nodiscard]] double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
};

/// Drives a stencil scheme over a mesh: derives the sweep order by a
/// topological sort of the per-level unknown dependencies (falling back to
/// fixed-point iteration on a cycle), advances the base trajectory, then
/// propagates exact linearizations for multisymplecticity measurements.
class SchemeRun {
public:
    SchemeRun(StencilScheme scheme, Mesh mesh, BoundaryCondition bc,
              const std::map<std::string, std::string>& initial_exprs);

    void advance();  // runs all nt levels (instability-guarded)

    [[nodiscard]] const StencilScheme& scheme() const { return scheme_; }
    [[nodiscard]] const Mesh& mesh() const { return mesh_; }
    [[nodiscard]] const SweepPlan& plan() const { return plan_; }
    [[nodiscard]] const Trajectory& base() const { return base_; }

    /// Recomputes every equation residual on the finished trajectory.
    [[nodiscard]] std::vector<double> residual_per_level() const;
    [[nodiscard]] double residual_max() const;

    /// Tangent trajectory with seeded random initial layers, propagated
    /// through the exact linearization of every sweep equation.
    [[nodiscard]] Trajectory propagate_tangent(std::uint64_t seed) const;
    [[nodiscard]] Trajectory propagate_tangent(Trajectory seed_layers) const;

    /// Zero-initialized trajectory with the same layout (for seeding).
    [[nodiscard]] Trajectory make_layout() const;

    /// Per-cell D_t(hx κ^t) + D_x(ht κ^x) over a tangent pair.
    [[nodiscard]] MsResidualStats multisymplectic_residual(const Trajectory& t1,
                                                           const Trajectory& t2) const;

private:
    struct PreparedEquation {
        std::vector<FiberCoord> refs;          // fiber support of the residual
        std::vector<ScalarExpr> ref_partials;  // ∂residual/∂ref, aligned with refs
        std::size_t target_index = 0;          // position of target in refs
        ScalarExpr target_coeff;               // ∂residual/∂target (target-free)
    };

    void build_plan();
    void prepare_equations();
    void fill_initial_layers(const std::map<std::string, std::string>& exprs);
    [[nodiscard]] double value(const Trajectory& t, int alpha, long i, int j) const;
    [[nodiscard]] long wrap(long i) const;
    void bind_node(EvalContext& ctx, const Trajectory& t, const ScalarExpr& expr, long i,
                   int j) const;
    void sweep_level(Trajectory& t, int level, const Trajectory* linearize_around) const;
    [[nodiscard]] double eval_kappa(const std::vector<KappaTerm>& terms, const Trajectory& t1,
                                    const Trajectory& t2, long i, int j, bool* valid) const;

    StencilScheme scheme_;
    Mesh mesh_;
    BoundaryCondition bc_;
    SweepPlan plan_;
    std::vector<PreparedEquation> prepared_;
    Trajectory base_;
    bool advanced_ = false;
};

}  // namespace dvbx
