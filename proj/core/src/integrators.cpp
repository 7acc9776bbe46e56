#include "dvbx/integrators.hpp"

#include <cmath>

#include "dvbx/error.hpp"
#include "dvbx/form.hpp"
#include "dvbx/operators.hpp"
#include "dvbx/random_forms.hpp"

namespace dvbx {

namespace {

FiberCoord q_coord() { return {0, MultiIndex{0}}; }
FiberCoord p_coord() { return {1, MultiIndex{0}}; }

}  // namespace

EulerBIntegrator::EulerBIntegrator(ScalarExpr hamiltonian, std::map<std::string, double> params,
                                   double newton_tol, int newton_max_iter)
    : space_(mechanics_space()),
      params_(std::move(params)),
      h_(std::move(hamiltonian)),
      tol_(newton_tol),
      max_iter_(newton_max_iter) {
    for (const auto& c : fiber_support(h_))
        if (!c.offset.is_zero())
            throw Error(ErrorCode::ConfigError,
                        "the Hamiltonian may depend on unshifted q, p only; found " +
                            c.to_string(&space_));
    hq_ = partial(h_, q_coord());
    hp_ = partial(h_, p_coord());
    hqq_ = partial(hq_, q_coord());
    hqp_ = partial(hq_, p_coord());
    hpp_ = partial(hp_, p_coord());
    separable_ = hqp_.is_zero();
}

double EulerBIntegrator::eval(const ScalarExpr& f, double q0, double p0, long n) const {
    EvalContext ctx;
    ctx.base = {static_cast<double>(n)};
    ctx.symbols = params_;
    ctx.fiber[q_coord()] = q0;
    ctx.fiber[p_coord()] = p0;
    return evaluate(f, ctx, &space_);
}

double EulerBIntegrator::solve_p(double q0, double p_prev, long n) const {
    if (separable_) return p_prev - eval(hq_, q0, 0.0, n);
    double p = p_prev;  // warm start at the previous momentum
    for (int it = 0; it < max_iter_; ++it) {
        double g = p - p_prev + eval(hq_, q0, p, n);
        if (std::fabs(g) <= tol_) return p;
        double gp = 1.0 + eval(hqp_, q0, p, n);
        if (!(std::fabs(gp) > 0.0))
            throw Error(ErrorCode::ConvergenceError, "Newton derivative vanished");
        p -= g / gp;
    }
    double g = p - p_prev + eval(hq_, q0, p, n);
    if (std::fabs(g) <= tol_) return p;
    throw Error(ErrorCode::ConvergenceError,
                "Newton iteration did not reach tolerance; last residual " + std::to_string(g));
}

EulerBIntegrator::StepResult EulerBIntegrator::step(const State& s, long n) const {
    StepResult out{};
    double p0 = solve_p(s.q, s.p_prev, n);
    double q1 = s.q + eval(hp_, s.q, p0, n);
    out.next = {q1, p0};
    out.implicit_residual = std::fabs(p0 - s.p_prev + eval(hq_, s.q, p0, n));

    // d(p0)/d(q0, p_prev) from the implicit relation, then chain into
    // q1 = q0 + H_p(q0, p0(q0, p_prev)); mixed partials coincide exactly.
    double hqp = eval(hqp_, s.q, p0, n);
    double hpp = eval(hpp_, s.q, p0, n);
    double denom = 1.0 + hqp;
    double dp_dq = -eval(hqq_, s.q, p0, n) / denom;
    double dp_dpprev = 1.0 / denom;
    double dq1_dq = 1.0 + hqp + hpp * dp_dq;
    double dq1_dpprev = hpp * dp_dpprev;
    out.jacobian[0][0] = dq1_dq;
    out.jacobian[0][1] = dq1_dpprev;
    out.jacobian[1][0] = dp_dq;
    out.jacobian[1][1] = dp_dpprev;
    return out;
}

EulerBIntegrator::Tangent EulerBIntegrator::push_tangent(const StepResult& at,
                                                         const Tangent& t) const {
    Tangent out{};
    out.dq = at.jacobian[0][0] * t.dq + at.jacobian[0][1] * t.dp_prev;
    out.dp_prev = at.jacobian[1][0] * t.dq + at.jacobian[1][1] * t.dp_prev;
    return out;
}

double EulerBIntegrator::omega(const Tangent& a, const Tangent& b) {
    return a.dp_prev * b.dq - a.dq * b.dp_prev;
}

void EulerBIntegrator::fd_jacobian(const State& s, long n, double eps, double out[2][2]) const {
    auto map = [&](double q, double pp) {
        StepResult r = step(State{q, pp}, n);
        return r.next;
    };
    State qp = map(s.q + eps, s.p_prev), qm = map(s.q - eps, s.p_prev);
    State pp = map(s.q, s.p_prev + eps), pm = map(s.q, s.p_prev - eps);
    out[0][0] = (qp.q - qm.q) / (2 * eps);
    out[0][1] = (pp.q - pm.q) / (2 * eps);
    out[1][0] = (qp.p_prev - qm.p_prev) / (2 * eps);
    out[1][1] = (pp.p_prev - pm.p_prev) / (2 * eps);
}

// ---------------------------------------------------------------------------
// Non-uniform mesh consistency

NonuniformConsistencyReport nonuniform_consistency(std::uint64_t seed, int cases) {
    NonuniformConsistencyReport report;
    Rng rng(seed);
    report.mesh_operator_exact = true;
    for (int p = 1; p <= 2 && report.mesh_operator_exact; ++p) {
        Space space{p, {"u"}};
        FormSampler sampler(space, rng);
        for (int c = 0; c < cases; ++c) {
            for (int k = 0; k <= p; ++k) {
                for (int l = 0; l <= 1; ++l) {
                    Form sigma = sampler.sample_form({k, l});
                    // Mesh operator with symbolic per-direction steps: the
                    // division by eps_i cancels the factor carried by the
                    // mesh one-form exactly.
                    Form mesh_dh(space);
                    for (int i = 0; i < p; ++i) {
                        ScalarExpr eps = ScalarExpr::symbol("eps" + std::to_string(i + 1));
                        Form mesh_one_form =
                            Form::term(space, WedgeMonomial::from_parts({i}, {}), eps);
                        mesh_dh += wedge(mesh_one_form, lie_difference(sigma, i) * eps.pow(-1));
                    }
                    if (!(mesh_dh == d_h(sigma))) {
                        report.mesh_operator_exact = false;
                        break;
                    }
                    ++report.symbolic_cases;
                }
                if (!report.mesh_operator_exact) break;
            }
            if (!report.mesh_operator_exact) break;
        }
    }

    // Divided forward difference of x^2 on a non-uniform mesh, then the same
    // mesh refined by midpoints: first order means the error halves.
    auto max_error = [](const std::vector<double>& xs) {
        double worst = 0.0;
        for (std::size_t n = 0; n + 1 < xs.size(); ++n) {
            double eps = xs[n + 1] - xs[n];
            double diff = (xs[n + 1] * xs[n + 1] - xs[n] * xs[n]) / eps;
            worst = std::max(worst, std::fabs(diff - 2.0 * xs[n]));
        }
        return worst;
    };
    std::vector<double> xs;
    double x = 0.0;
    for (int n = 0; n <= 64; ++n) {
        xs.push_back(x);
        x += 0.01 * (1.0 + 0.9 * (static_cast<double>(rng.raw()) / 18446744073709551615.0));
    }
    std::vector<double> fine;
    for (std::size_t n = 0; n + 1 < xs.size(); ++n) {
        fine.push_back(xs[n]);
        fine.push_back(0.5 * (xs[n] + xs[n + 1]));
    }
    fine.push_back(xs.back());
    report.convergence_ratio = max_error(xs) / max_error(fine);
    report.ratio_ok = std::fabs(report.convergence_ratio - 2.0) <= 0.1;

    double worst_const = 0.0;
    const double c = 3.5;
    for (std::size_t n = 0; n + 1 < xs.size(); ++n) {
        double diff = (c - c) / (xs[n + 1] - xs[n]);
        worst_const = std::max(worst_const, std::fabs(diff));
    }
    report.constant_residual = worst_const;
    return report;
}

}  // namespace dvbx
