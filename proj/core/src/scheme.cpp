#include "dvbx/scheme.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "dvbx/error.hpp"
#include "dvbx/parser.hpp"

namespace dvbx {

FieldGrid::FieldGrid(std::size_t nx, int j_first, int j_last)
    : nx_(nx), j_first_(j_first), j_last_(j_last) {
    data_.assign(nx_ * static_cast<std::size_t>(j_last_ - j_first_ + 1), 0.0);
}

double& FieldGrid::at(long i, int j) {
    assert(i >= 0 && static_cast<std::size_t>(i) < nx_ && has_level(j));
    return data_[static_cast<std::size_t>(j - j_first_) * nx_ + static_cast<std::size_t>(i)];
}

double FieldGrid::at(long i, int j) const {
    assert(i >= 0 && static_cast<std::size_t>(i) < nx_ && has_level(j));
    return data_[static_cast<std::size_t>(j - j_first_) * nx_ + static_cast<std::size_t>(i)];
}

// ---------------------------------------------------------------------------
// Scheme definitions

namespace {

FiberCoord fc(int alpha, int di, int dj) { return {alpha, MultiIndex{di, dj}}; }

}  // namespace

StencilScheme make_wave_scheme(const ScalarExpr& potential, double eps) {
    StencilScheme s;
    s.name = "stormer-verlet-wave";
    s.space = Space{2, {"u", "v", "w", "p"}};
    // Array slot (i,j) holds u(i,j), v(i,j+1/2), w(i+1/2,j), p(i+1/2,j+1/2).
    s.fields = {
        {"u", 0.0, 0.0, 0},
        {"v", 0.0, 0.5, -1},
        {"w", 0.5, 0.0, 0},
        {"p", 0.5, 0.5, -1},
    };
    s.params["eps"] = eps;
    auto P = [&s](const std::string& src) { return parse_expr(src, s.space); };
    ScalarExpr vprime = partial(potential, fc(0, 0, 0));

    s.equations.push_back({"momentum",
                           P("-(v[0,0]-v[0,-1])/ht - (w[0,0]-w[-1,0])/hx") - vprime,
                           fc(1, 0, 0)});
    s.equations.push_back({"u-update",
                           P("(u[0,1]-u[0,0])/ht + (p[0,0]-p[-1,0])/hx - v[0,0]"),
                           fc(0, 0, 1)});
    s.equations.push_back({"strain",
                           P("(u[1,0]-u[0,0])/hx - eps*(p[0,0]-p[0,-1])/ht - eps*w[0,0]"),
                           fc(3, 0, 0)});
    s.equations.push_back({"w-update",
                           P("eps*(w[0,1]-w[0,0])/ht - (v[1,0]-v[0,0])/hx"),
                           fc(2, 0, 1)});

    ScalarExpr one(1);
    ScalarExpr eps_sym = ScalarExpr::symbol("eps");
    s.kappa_t = {{one, fc(1, 0, -1), fc(0, 0, 0)}, {eps_sym, fc(3, 0, -1), fc(2, 0, 0)}};
    s.kappa_x = {{one, fc(2, -1, 0), fc(0, 0, 0)}, {-one, fc(3, -1, 0), fc(1, 0, 0)}};
    return s;
}

StencilScheme make_zakharov_scheme() {
    StencilScheme s;
    s.name = "euler-box-zakharov";
    s.space = Space{2, {"u", "v", "p", "q", "w", "psi", "phi"}};
    // u and psi are stored one level behind (initial layer at j = -1).
    s.fields = {
        {"u", 0.0, 0.0, -1}, {"v", 0.0, 0.0, 0},   {"p", 0.0, 0.0, 0},  {"q", 0.0, 0.0, 0},
        {"w", 0.0, 0.0, 0},  {"psi", 0.0, 0.0, -1}, {"phi", 0.0, 0.0, 0},
    };
    auto P = [&s](const std::string& src) { return parse_expr(src, s.space); };

    s.equations.push_back({"v-update",
                           P("-(v[0,1]-v[0,0])/ht + (p[1,0]-p[0,0])/hx + 2*u[0,0]*psi[0,0]"),
                           fc(1, 0, 1)});
    s.equations.push_back({"u-update",
                           P("(u[0,0]-u[0,-1])/ht + (q[1,0]-q[0,0])/hx + 2*v[0,0]*psi[0,0]"),
                           fc(0, 0, 0)});
    s.equations.push_back({"p-diagnostic", P("-(u[0,0]-u[-1,0])/hx + p[0,0]"), fc(2, 0, 0)});
    s.equations.push_back({"q-diagnostic", P("-(v[0,0]-v[-1,0])/hx + q[0,0]"), fc(3, 0, 0)});
    s.equations.push_back({"w-update",
                           P("(w[0,1]-w[0,0])/ht - psi[0,0] + u[0,0]^2 + v[0,0]^2"),
                           fc(4, 0, 1)});
    s.equations.push_back({"psi-update",
                           P("-(psi[0,0]-psi[0,-1])/ht + (phi[0,0]-phi[-1,0])/hx"),
                           fc(5, 0, 0)});
    s.equations.push_back({"phi-diagnostic", P("-(w[1,0]-w[0,0])/hx + phi[0,0]"), fc(6, 0, 0)});

    ScalarExpr one(1);
    s.kappa_t = {{-one, fc(0, 0, -1), fc(1, 0, 0)}, {one, fc(5, 0, -1), fc(4, 0, 0)}};
    s.kappa_x = {{one, fc(0, -1, 0), fc(2, 0, 0)},
                 {one, fc(1, -1, 0), fc(3, 0, 0)},
                 {-one, fc(6, -1, 0), fc(4, 0, 0)}};
    return s;
}

// ---------------------------------------------------------------------------
// SchemeRun

SchemeRun::SchemeRun(StencilScheme scheme, Mesh mesh, BoundaryCondition bc,
                     const std::map<std::string, std::string>& initial_exprs)
    : scheme_(std::move(scheme)), mesh_(std::move(mesh)), bc_(bc) {
    const int q = scheme_.space.fiber_dim();
    if (static_cast<int>(scheme_.fields.size()) != q)
        throw Error(ErrorCode::ConfigError, "scheme field list does not match its signature");
    build_plan();
    prepare_equations();
    for (int a = 0; a < q; ++a)
        base_.fields.emplace_back(mesh_.nx(), scheme_.fields[static_cast<std::size_t>(a)].first_level,
                                  static_cast<int>(mesh_.nt()));
    fill_initial_layers(initial_exprs);
}

void SchemeRun::build_plan() {
    const auto& eqs = scheme_.equations;
    const std::size_t n = eqs.size();
    // Production level per field alpha.
    std::map<int, int> produced_at;
    std::map<int, std::size_t> producer;
    for (std::size_t e = 0; e < n; ++e) {
        const auto& t = eqs[e].target;
        if (t.offset[0] != 0)
            throw Error(ErrorCode::ConfigError, "scheme targets must sit at the base x-index");
        if (produced_at.count(t.alpha))
            throw Error(ErrorCode::ConfigError, "two equations produce the same field");
        produced_at[t.alpha] = t.offset[1];
        producer[t.alpha] = e;
    }
    if (produced_at.size() != static_cast<std::size_t>(scheme_.space.fiber_dim()))
        throw Error(ErrorCode::ConfigError, "every field needs exactly one producing equation");

    // Edge e -> d when equation e references field values that equation d
    // produces within the same sweep level.
    std::vector<std::vector<std::size_t>> deps(n);
    for (std::size_t e = 0; e < n; ++e) {
        for (const auto& c : fiber_support(eqs[e].residual)) {
            auto it = produced_at.find(c.alpha);
            if (it == produced_at.end()) continue;
            if (c.offset[1] == it->second) {
                std::size_t d = producer.at(c.alpha);
                if (d != e) deps[e].push_back(d);
            }
        }
    }
    // Kahn's algorithm.
    std::vector<int> pending(n, 0);
    for (std::size_t e = 0; e < n; ++e)
        pending[e] = static_cast<int>(deps[e].size());
    std::vector<std::vector<std::size_t>> users(n);
    for (std::size_t e = 0; e < n; ++e)
        for (std::size_t d : deps[e]) users[d].push_back(e);
    std::vector<std::size_t> ready;
    for (std::size_t e = 0; e < n; ++e)
        if (pending[e] == 0) ready.push_back(e);
    SweepPlan plan;
    while (!ready.empty()) {
        // Smallest index first keeps the order deterministic.
        auto it = std::min_element(ready.begin(), ready.end());
        std::size_t e = *it;
        ready.erase(it);
        plan.order.push_back(e);
        for (std::size_t u : users[e])
            if (--pending[u] == 0) ready.push_back(u);
    }
    if (plan.order.size() != n) {
        plan.order.clear();
        for (std::size_t e = 0; e < n; ++e) plan.order.push_back(e);
        plan.needs_fixed_point = true;
    }
    plan_ = plan;
}

void SchemeRun::prepare_equations() {
    prepared_.clear();
    for (const auto& eq : scheme_.equations) {
        PreparedEquation prep;
        auto support = fiber_support(eq.residual);
        prep.refs.assign(support.begin(), support.end());
        bool found = false;
        for (std::size_t r = 0; r < prep.refs.size(); ++r) {
            prep.ref_partials.push_back(partial(eq.residual, prep.refs[r]));
            if (prep.refs[r] == eq.target) {
                prep.target_index = r;
                found = true;
            }
        }
        if (!found)
            throw Error(ErrorCode::ConfigError,
                        "equation '" + eq.name + "' does not reference its target");
        prep.target_coeff = prep.ref_partials[prep.target_index];
        if (!partial(prep.target_coeff, eq.target).is_zero())
            throw Error(ErrorCode::ConfigError,
                        "equation '" + eq.name + "' is not linear in its target");
        prepared_.push_back(std::move(prep));
    }
}

void SchemeRun::fill_initial_layers(const std::map<std::string, std::string>& exprs) {
    Space scalar_space{1, {}};
    for (int a = 0; a < scheme_.space.fiber_dim(); ++a) {
        const auto& spec = scheme_.fields[static_cast<std::size_t>(a)];
        int produced_from = 0;
        for (const auto& eq : scheme_.equations)
            if (eq.target.alpha == a) produced_from = eq.target.offset[1];
        if (spec.first_level >= produced_from) continue;  // no free initial layer

        ScalarExpr expr;  // default zero
        auto it = exprs.find(spec.name);
        if (it != exprs.end()) expr = parse_expr(it->second, scalar_space);

        for (int j = spec.first_level; j < produced_from; ++j) {
            for (std::size_t i = 0; i < mesh_.nx(); ++i) {
                EvalContext ctx;
                ctx.symbols = scheme_.params;
                ctx.symbols["pi"] = 3.14159265358979323846;
                double hx_i = mesh_.hx(i);
                double ht_0 = mesh_.ht(0);
                ctx.symbols["x"] = mesh_.x(i) + spec.x_stagger * hx_i;
                ctx.symbols["t"] =
                    mesh_.t(0) + (static_cast<double>(j) + spec.t_stagger) * ht_0;
                ctx.symbols["L"] = mesh_.x(mesh_.nx()) - mesh_.x(0);
                base_.fields[static_cast<std::size_t>(a)].at(static_cast<long>(i), j) =
                    evaluate(expr, ctx);
            }
        }
    }
}

long SchemeRun::wrap(long i) const {
    long nx = static_cast<long>(mesh_.nx());
    long r = i % nx;
    return r < 0 ? r + nx : r;
}

double SchemeRun::value(const Trajectory& t, int alpha, long i, int j) const {
    return t.fields[static_cast<std::size_t>(alpha)].at(wrap(i), j);
}

void SchemeRun::bind_node(EvalContext& ctx, const Trajectory& t, const ScalarExpr& expr, long i,
                          int j) const {
    ctx.fiber.clear();
    for (const auto& c : fiber_support(expr))
        ctx.fiber[c] = value(t, c.alpha, i + c.offset[0], j + c.offset[1]);
}

void SchemeRun::sweep_level(Trajectory& t, int level,
                            const Trajectory* linearize_around) const {
    const long nx = static_cast<long>(mesh_.nx());
    EvalContext ctx;
    ctx.symbols = scheme_.params;
    ctx.symbols["hx"] = mesh_.hx(0);
    ctx.symbols["ht"] = mesh_.ht(static_cast<std::size_t>(level));
    const int max_sweeps = plan_.needs_fixed_point ? 500 : 1;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t idx : plan_.order) {
            const auto& eq = scheme_.equations[idx];
            const auto& prep = prepared_[idx];
            for (long i = 0; i < nx; ++i) {
                if (bc_ == BoundaryCondition::Dirichlet) {
                    bool out_of_range = false;
                    for (const auto& c : prep.refs) {
                        long ri = i + c.offset[0];
                        if (ri < 0 || ri >= nx) out_of_range = true;
                    }
                    if (out_of_range) continue;  // boundary values stay frozen
                }
                ctx.symbols["hx"] = mesh_.hx(static_cast<std::size_t>(wrap(i)));
                double solved;
                if (!linearize_around) {
                    bind_node(ctx, t, eq.residual, i, level);
                    ctx.fiber[eq.target] = 0.0;
                    double r0 = evaluate(eq.residual, ctx, &scheme_.space);
                    double a = evaluate(prep.target_coeff, ctx, &scheme_.space);
                    if (!(std::fabs(a) > 0.0))
                        throw Error(ErrorCode::SolverError,
                                    "equation '" + eq.name + "' has a vanishing target coefficient");
                    solved = -r0 / a;
                } else {
                    // Exact linearization: sum c_ref * delta(ref) = 0.
                    EvalContext base_ctx;
                    base_ctx.symbols = ctx.symbols;
                    bind_node(base_ctx, *linearize_around, eq.residual, i, level);
                    double num = 0.0;
                    double a = 0.0;
                    for (std::size_t r = 0; r < prep.refs.size(); ++r) {
                        double c = evaluate(prep.ref_partials[r], base_ctx, &scheme_.space);
                        if (r == prep.target_index) {
                            a = c;
                        } else {
                            const auto& rc = prep.refs[r];
                            num += c * value(t, rc.alpha, i + rc.offset[0], level + rc.offset[1]);
                        }
                    }
                    if (!(std::fabs(a) > 0.0))
                        throw Error(ErrorCode::SolverError,
                                    "linearized equation '" + eq.name + "' lost its target");
                    solved = -num / a;
                }
                double& slot = t.fields[static_cast<std::size_t>(eq.target.alpha)].at(
                    wrap(i + eq.target.offset[0]), level + eq.target.offset[1]);
                max_change = std::max(max_change, std::fabs(slot - solved));
                slot = solved;
            }
        }
        if (max_change < 1e-13) break;
        if (sweep == max_sweeps - 1 && plan_.needs_fixed_point)
            throw Error(ErrorCode::ConvergenceError,
                        "fixed-point sweep did not converge at level " + std::to_string(level));
    }
}

void SchemeRun::advance() {
    for (int level = 0; level < static_cast<int>(mesh_.nt()); ++level) {
        sweep_level(base_, level, nullptr);
        for (const auto& eq : scheme_.equations) {
            for (long i = 0; i < static_cast<long>(mesh_.nx()); ++i) {
                double v = value(base_, eq.target.alpha, i, level + eq.target.offset[1]);
                if (!std::isfinite(v) || std::fabs(v) > 1e10)
                    throw Error(ErrorCode::ConvergenceError,
                                scheme_.name + " became unstable at step " + std::to_string(level));
            }
        }
    }
    advanced_ = true;
}

std::vector<double> SchemeRun::residual_per_level() const {
    std::vector<double> out(mesh_.nt(), 0.0);
    EvalContext ctx;
    ctx.symbols = scheme_.params;
    for (int level = 0; level < static_cast<int>(mesh_.nt()); ++level) {
        ctx.symbols["ht"] = mesh_.ht(static_cast<std::size_t>(level));
        double worst = 0.0;
        for (std::size_t e = 0; e < scheme_.equations.size(); ++e) {
            const auto& eq = scheme_.equations[e];
            const auto& prep = prepared_[e];
            for (long i = 0; i < static_cast<long>(mesh_.nx()); ++i) {
                bool valid = true;
                for (const auto& c : prep.refs) {
                    if (!base_.fields[static_cast<std::size_t>(c.alpha)].has_level(level +
                                                                                   c.offset[1]))
                        valid = false;
                    if (bc_ == BoundaryCondition::Dirichlet) {
                        long ri = i + c.offset[0];
                        if (ri < 0 || ri >= static_cast<long>(mesh_.nx())) valid = false;
                    }
                }
                if (!valid) continue;
                ctx.symbols["hx"] = mesh_.hx(static_cast<std::size_t>(wrap(i)));
                EvalContext node = ctx;
                bind_node(node, base_, eq.residual, i, level);
                worst = std::max(worst, std::fabs(evaluate(eq.residual, node, &scheme_.space)));
            }
        }
        out[static_cast<std::size_t>(level)] = worst;
    }
    return out;
}

double SchemeRun::residual_max() const {
    double m = 0.0;
    for (double v : residual_per_level()) m = std::max(m, v);
    return m;
}

Trajectory SchemeRun::make_layout() const {
    Trajectory t;
    for (int a = 0; a < scheme_.space.fiber_dim(); ++a)
        t.fields.emplace_back(mesh_.nx(), scheme_.fields[static_cast<std::size_t>(a)].first_level,
                              static_cast<int>(mesh_.nt()));
    return t;
}

Trajectory SchemeRun::propagate_tangent(std::uint64_t seed) const {
    Rng rng(seed);
    Trajectory t = make_layout();
    for (int a = 0; a < scheme_.space.fiber_dim(); ++a) {
        const auto& spec = scheme_.fields[static_cast<std::size_t>(a)];
        int produced_from = 0;
        for (const auto& eq : scheme_.equations)
            if (eq.target.alpha == a) produced_from = eq.target.offset[1];
        for (int j = spec.first_level; j < produced_from; ++j)
            for (long i = 0; i < static_cast<long>(mesh_.nx()); ++i)
                t.fields[static_cast<std::size_t>(a)].at(i, j) =
                    2.0 * (static_cast<double>(rng.raw()) / 18446744073709551615.0) - 1.0;
    }
    return propagate_tangent(std::move(t));
}

Trajectory SchemeRun::propagate_tangent(Trajectory seed_layers) const {
    if (!advanced_)
        throw Error(ErrorCode::PreconditionFailed, "base trajectory has not been advanced");
    for (int level = 0; level < static_cast<int>(mesh_.nt()); ++level)
        sweep_level(seed_layers, level, &base_);
    return seed_layers;
}

double SchemeRun::eval_kappa(const std::vector<KappaTerm>& terms, const Trajectory& t1,
                             const Trajectory& t2, long i, int j, bool* valid) const {
    EvalContext ctx;
    ctx.symbols = scheme_.params;
    double sum = 0.0;
    for (const auto& term : terms) {
        for (const auto& c : {term.a, term.b}) {
            if (!t1.fields[static_cast<std::size_t>(c.alpha)].has_level(j + c.offset[1])) {
                *valid = false;
                return 0.0;
            }
        }
        double coeff = evaluate(term.coefficient, ctx, &scheme_.space);
        double a1 = value(t1, term.a.alpha, i + term.a.offset[0], j + term.a.offset[1]);
        double b1 = value(t1, term.b.alpha, i + term.b.offset[0], j + term.b.offset[1]);
        double a2 = value(t2, term.a.alpha, i + term.a.offset[0], j + term.a.offset[1]);
        double b2 = value(t2, term.b.alpha, i + term.b.offset[0], j + term.b.offset[1]);
        sum += coeff * (a1 * b2 - a2 * b1);
    }
    *valid = true;
    return sum;
}

MsResidualStats SchemeRun::multisymplectic_residual(const Trajectory& t1,
                                                    const Trajectory& t2) const {
    MsResidualStats stats;
    stats.per_level_max.assign(mesh_.nt(), 0.0);
    stats.per_level_l2.assign(mesh_.nt(), 0.0);
    const long nx = static_cast<long>(mesh_.nx());
    for (int j = 0; j < static_cast<int>(mesh_.nt()); ++j) {
        double level_max = 0.0, level_l2 = 0.0;
        for (long i = 0; i < nx; ++i) {
            if (bc_ == BoundaryCondition::Dirichlet && (i == 0 || i >= nx - 1)) continue;
            bool v1 = false, v2 = false, v3 = false, v4 = false;
            double kt0 = eval_kappa(scheme_.kappa_t, t1, t2, i, j, &v1);
            double kt1 = eval_kappa(scheme_.kappa_t, t1, t2, i, j + 1, &v2);
            double kx0 = eval_kappa(scheme_.kappa_x, t1, t2, i, j, &v3);
            double kx1 = eval_kappa(scheme_.kappa_x, t1, t2, i + 1, j, &v4);
            if (!(v1 && v2 && v3 && v4)) continue;
            double hx_i = mesh_.hx(static_cast<std::size_t>(wrap(i)));
            double ht_j = mesh_.ht(static_cast<std::size_t>(j));
            double r = hx_i * (kt1 - kt0) + ht_j * (kx1 - kx0);
            stats.scale = std::max({stats.scale, std::fabs(hx_i * kt0), std::fabs(ht_j * kx0)});
            level_max = std::max(level_max, std::fabs(r));
            level_l2 += r * r;
        }
        stats.per_level_max[static_cast<std::size_t>(j)] = level_max;
        stats.per_level_l2[static_cast<std::size_t>(j)] = std::sqrt(level_l2);
        stats.max_abs = std::max(stats.max_abs, level_max);
    }
    return stats;
}

}  // namespace dvbx
