#include "dvbx/reports.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "dvbx/error.hpp"
#include "dvbx/homotopy.hpp"
#include "dvbx/integrators.hpp"
#include "dvbx/parser.hpp"
#include "dvbx/scheme.hpp"

namespace dvbx {

std::uint64_t config_hash(const Json& config) {
    std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

/// Structural equality is decisive only on the polynomial/Laurent fragment;
/// a nonzero residual that carries opaque function atoms is reported as
/// unverified instead of failed.
std::string residual_verdict(const ScalarExpr& residual) {
    if (residual.is_zero()) return "zero";
    for (const auto& [m, c] : residual.terms())
        for (const auto& [a, e] : m.factors())
            if (a.kind() == Atom::Kind::Function)
                return "unverified equality (opaque function atoms)";
    return "nonzero";
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Json report_header(const std::string& command, const Json& config, std::uint64_t seed) {
    Json h;
    h["tool"] = "dvbx";
    h["version"] = kVersion;
    h["command"] = command;
    h["config_hash"] = hex64(config_hash(config));
    h["seed"] = seed;
    return h;
}

Json check_report(const std::vector<CheckOutcome>& outcomes, const CheckOptions& opt) {
    Json report;
    report["seed"] = opt.seed;
    report["cases_per_slot"] = opt.cases;
    report["all_passed"] = all_passed(outcomes);
    Json list = Json::array();
    for (const auto& o : outcomes) {
        Json j;
        j["name"] = o.name;
        j["pass"] = o.pass;
        j["cases"] = o.cases;
        if (!o.note.empty()) j["note"] = o.note;
        if (!o.counterexample.empty()) j["counterexample"] = o.counterexample;
        list.push_back(std::move(j));
    }
    report["identities"] = std::move(list);
    return report;
}

// ---------------------------------------------------------------------------
// Problem loading

ProblemSpec load_problem(const Json& spec) {
    if (!spec.contains("space"))
        throw Error(ErrorCode::ConfigError, "problem spec needs a \"space\" section");
    const auto& sp = spec.at("space");
    ProblemSpec out{Space{sp.at("p").get<int>(), sp.at("vars").get<std::vector<std::string>>()},
                    std::nullopt,
                    std::nullopt,
                    {},
                    {}};
    if (out.space.base_dim < 1)
        throw Error(ErrorCode::ConfigError, "space dimension must be positive");
    if (out.space.fiber_dim() < 1)
        throw Error(ErrorCode::ConfigError, "at least one dependent variable is required");

    if (spec.contains("lagrangian"))
        out.lagrangian = parse_expr(spec.at("lagrangian").get<std::string>(), out.space);

    if (spec.contains("degenerate")) {
        const auto& d = spec.at("degenerate");
        std::vector<std::vector<ScalarExpr>> L;
        for (const auto& row : d.at("L")) {
            std::vector<ScalarExpr> r;
            for (const auto& entry : row) r.push_back(parse_expr(entry.get<std::string>(), out.space));
            L.push_back(std::move(r));
        }
        ScalarExpr H;
        if (d.contains("H")) H = parse_expr(d.at("H").get<std::string>(), out.space);
        out.degenerate.emplace(out.space, std::move(L), std::move(H));
    }

    if (spec.contains("characteristic"))
        for (const auto& q : spec.at("characteristic"))
            out.characteristics.push_back(parse_expr(q.get<std::string>(), out.space));

    if (spec.contains("source"))
        for (const auto& e : spec.at("source"))
            out.source_components.push_back(parse_expr(e.get<std::string>(), out.space));

    return out;
}

namespace {

LagrangianForm problem_lagrangian(const ProblemSpec& problem) {
    if (problem.lagrangian) return LagrangianForm(problem.space, *problem.lagrangian);
    if (problem.degenerate) return problem.degenerate->lagrangian();
    throw Error(ErrorCode::ConfigError, "problem spec needs a Lagrangian");
}

Json expr_list(const std::vector<ScalarExpr>& exprs, const Space& space) {
    Json out = Json::array();
    for (const auto& e : exprs) out.push_back(e.to_string(&space));
    return out;
}

}  // namespace

Json el_report(const ProblemSpec& problem) {
    Json out;
    SourceForm e = problem.degenerate ? el_system(*problem.degenerate)
                                      : euler_lagrange(problem_lagrangian(problem));
    out["euler_lagrange"] = expr_list(e.components, problem.space);
    return out;
}

Json noether_report(const ProblemSpec& problem) {
    if (problem.characteristics.empty())
        throw Error(ErrorCode::ConfigError, "noether needs a characteristic");
    LagrangianForm L = problem_lagrangian(problem);
    VectorField v(problem.space, problem.characteristics);
    ConservationLaw law = noether(L, v);
    Json out;
    out["euler_lagrange"] = expr_list(euler_lagrange(L).components, problem.space);
    Json lambda;
    lambda["components"] = expr_list(law.components, problem.space);
    lambda["form"] = law.lambda.to_string();
    out["lambda"] = std::move(lambda);
    out["verified"] = law.verified;
    ScalarExpr residual = law.divergence - law.characteristic_pairing;
    out["residual"] = residual.to_string(&problem.space);
    out["residual_verdict"] = residual_verdict(residual);
    out["divergence"] = law.divergence.to_string(&problem.space);
    out["gauge"] = "lambda is one representative; any d_h-closed (p-1,0)-form may be added";
    return out;
}

Json inverse_report(const ProblemSpec& problem) {
    if (problem.source_components.empty())
        throw Error(ErrorCode::ConfigError, "inverse needs source-form components");
    SourceForm omega(problem.space, problem.source_components);
    Json out;
    try {
        LagrangianForm L = inverse_variational(omega);
        out["variational"] = true;
        out["helmholtz_obstruction"] = "0";
        out["lagrangian"] = L.density.to_string(&problem.space);
        out["verified"] = true;
    } catch (const Error& err) {
        if (err.code() != ErrorCode::HelmholtzFailed) throw;
        out["variational"] = false;
        out["helmholtz_obstruction"] = err.what();
        out["lagrangian"] = nullptr;
        out["verified"] = false;
    }
    return out;
}

Json ms_report(const ProblemSpec& problem) {
    if (!problem.degenerate)
        throw Error(ErrorCode::ConfigError, "ms needs a degenerate Lagrangian");
    const auto& dl = *problem.degenerate;
    MultisymplecticStructure st = structure(dl);
    StructuralIdentity id = structural_identity(dl);
    Json out;
    out["el"] = expr_list(el_system(dl).components, problem.space);
    Json kappas = Json::array();
    for (const auto& k : st.kappa) kappas.push_back(k.to_string());
    out["kappa"] = std::move(kappas);
    out["eta"] = st.eta.to_string();
    out["omega"] = st.omega.to_string();
    out["structural_residual"] = id.residual.to_string();
    {
        ScalarExpr probe;
        for (const auto& [m, f] : id.residual.terms()) probe += f;
        out["structural_residual_verdict"] = residual_verdict(probe);
    }
    if (!problem.characteristics.empty()) {
        MultimomentumCandidate cand = multimomentum(dl, problem.characteristics);
        Json mm;
        mm["lambda"] = cand.lambda.to_string();
        mm["components"] = expr_list(cand.components, problem.space);
        Json flags;
        flags["is_momentum_map"] = cand.is_momentum_map;
        flags["is_conservation_law"] = cand.is_conservation_law;
        mm["flags"] = std::move(flags);
        mm["local_residual"] = cand.local_residual.to_string(&problem.space);
        out["multimomentum"] = std::move(mm);
    } else {
        out["multimomentum"] = nullptr;
    }
    return out;
}

Json momentum_report(const ProblemSpec& problem) {
    if (!problem.degenerate || problem.characteristics.empty())
        throw Error(ErrorCode::ConfigError, "momentum needs a degenerate Lagrangian and a characteristic");
    MultimomentumCandidate cand = multimomentum(*problem.degenerate, problem.characteristics);
    Json out;
    out["lambda"] = cand.lambda.to_string();
    out["components"] = expr_list(cand.components, problem.space);
    Json flags;
    flags["is_momentum_map"] = cand.is_momentum_map;
    flags["is_conservation_law"] = cand.is_conservation_law;
    out["flags"] = std::move(flags);
    out["local_residual"] = cand.local_residual.to_string(&problem.space);
    return out;
}

// ---------------------------------------------------------------------------
// Integration runs

namespace {

std::vector<double> axis_nodes(const Json& mesh, const char* nodes_key, const char* steps_key,
                               const char* count_key, const char* step_key, const char* origin_key) {
    if (mesh.contains(nodes_key)) return mesh.at(nodes_key).get<std::vector<double>>();
    double origin = mesh.value(origin_key, 0.0);
    std::vector<double> out{origin};
    if (mesh.contains(steps_key)) {
        for (double s : mesh.at(steps_key)) out.push_back(out.back() + s);
        return out;
    }
    if (!mesh.contains(count_key) || !mesh.contains(step_key))
        throw Error(ErrorCode::ConfigError,
                    std::string("mesh needs ") + nodes_key + ", " + steps_key + " or (" + count_key +
                        ", " + step_key + ")");
    auto n = mesh.at(count_key).get<long>();
    if (n < 1) throw Error(ErrorCode::ConfigError, std::string(count_key) + " must be positive");
    double h = mesh.at(step_key).get<double>();
    for (long i = 0; i < n; ++i) out.push_back(out.back() + h);
    return out;
}

Mesh mesh_from_json(const Json& mesh) {
    return Mesh::from_nodes(axis_nodes(mesh, "x_nodes", "x_steps", "nx", "hx", "x0"),
                            axis_nodes(mesh, "t_nodes", "t_steps", "nt", "ht", "t0"));
}

std::string csv_header() {
    return "step,time,max_scheme_residual,ms_residual_max,ms_residual_l2,omega_drift\n";
}

std::string csv_row(long step, double time, double res, double ms_max, double ms_l2,
                    double drift) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", step, time, res, ms_max,
                  ms_l2, drift);
    return buf;
}

IntegrateResult run_euler_b(const Json& config) {
    const Json params_json = config.value("params", Json::object());
    std::map<std::string, double> params;
    for (auto it = params_json.begin(); it != params_json.end(); ++it)
        params[it.key()] = it.value().get<double>();

    ScalarExpr H = parse_expr(config.at("hamiltonian").get<std::string>(),
                              EulerBIntegrator::mechanics_space());
    EulerBIntegrator integ(H, params);

    long steps = config.at("steps").get<long>();
    if (steps < 1) throw Error(ErrorCode::ConfigError, "steps must be positive");
    const Json init = config.value("initial", Json::object());
    EulerBIntegrator::State state{init.value("q", 1.0), init.value("p", 0.0)};

    const Json seeds = config.value("seeds", Json::object());
    Rng rng(seeds.value("tangent", 7ULL));
    auto unit = [&rng]() {
        return 2.0 * (static_cast<double>(rng.raw()) / 18446744073709551615.0) - 1.0;
    };
    EulerBIntegrator::Tangent t1{unit(), unit()};
    EulerBIntegrator::Tangent t2{unit(), unit()};
    double omega0 = EulerBIntegrator::omega(t1, t2);

    const Json thr = config.value("thresholds", Json::object());
    double thr_drift = thr.value("omega_drift", 1e-10);
    double thr_jac = thr.value("jacobian_det", 1e-12);
    double thr_res = thr.value("scheme_residual", 1e-12);

    std::string csv = csv_header();
    double max_drift = 0.0, max_jac_dev = 0.0, max_res = 0.0;
    for (long n = 0; n < steps; ++n) {
        auto r = integ.step(state, n);
        double det = r.jacobian[0][0] * r.jacobian[1][1] - r.jacobian[0][1] * r.jacobian[1][0];
        max_jac_dev = std::max(max_jac_dev, std::fabs(det - 1.0));
        max_res = std::max(max_res, r.implicit_residual);
        t1 = integ.push_tangent(r, t1);
        t2 = integ.push_tangent(r, t2);
        double drift = std::fabs(EulerBIntegrator::omega(t1, t2) - omega0) /
                       std::max(std::fabs(omega0), 1e-300);
        max_drift = std::max(max_drift, drift);
        state = r.next;
        csv += csv_row(n + 1, static_cast<double>(n + 1), r.implicit_residual, 0.0, 0.0, drift);
    }

    IntegrateResult out;
    out.csv = std::move(csv);
    out.manifest = report_header("integrate", config, seeds.value("tangent", 7ULL));
    out.manifest["scheme"] = "euler-b";
    out.manifest["separable"] = integ.separable();
    Json tol;
    tol["newton_tol"] = 1e-12;
    tol["newton_max_iter"] = 50;
    out.manifest["tolerances"] = std::move(tol);
    Json summary;
    summary["steps"] = steps;
    summary["max_scheme_residual"] = max_res;
    summary["max_jacobian_det_deviation"] = max_jac_dev;
    summary["max_omega_drift"] = max_drift;
    out.manifest["summary"] = std::move(summary);
    out.thresholds_met = max_drift <= thr_drift && max_jac_dev <= thr_jac && max_res <= thr_res;
    Json thresholds;
    thresholds["omega_drift"] = thr_drift;
    thresholds["jacobian_det"] = thr_jac;
    thresholds["scheme_residual"] = thr_res;
    out.manifest["thresholds"] = std::move(thresholds);
    out.manifest["thresholds_met"] = out.thresholds_met;
    return out;
}

IntegrateResult run_pde_scheme(const Json& config) {
    const std::string name = config.at("scheme").get<std::string>();
    const Json params_json = config.value("params", Json::object());

    StencilScheme scheme;
    if (name == "stormer-verlet-wave") {
        double eps = params_json.value("eps", -1.0);
        Space wave_space{2, {"u", "v", "w", "p"}};
        ScalarExpr V = parse_expr(config.value("potential", std::string("1 - cos(u)")), wave_space);
        scheme = make_wave_scheme(V, eps);
    } else if (name == "euler-box-zakharov") {
        scheme = make_zakharov_scheme();
    } else {
        throw Error(ErrorCode::ConfigError, "unknown scheme '" + name + "'");
    }
    for (auto it = params_json.begin(); it != params_json.end(); ++it)
        scheme.params[it.key()] = it.value().get<double>();

    Mesh mesh = mesh_from_json(config.at("mesh"));
    std::string bc_name = config.value("bc", std::string("periodic"));
    BoundaryCondition bc = bc_name == "dirichlet" ? BoundaryCondition::Dirichlet
                                                  : BoundaryCondition::Periodic;
    if (bc_name != "periodic" && bc_name != "dirichlet")
        throw Error(ErrorCode::ConfigError, "bc must be 'periodic' or 'dirichlet'");

    std::map<std::string, std::string> initial;
    if (config.contains("initial"))
        for (auto it = config.at("initial").begin(); it != config.at("initial").end(); ++it)
            initial[it.key()] = it.value().get<std::string>();

    SchemeRun run(scheme, mesh, bc, initial);
    run.advance();

    const Json seeds = config.value("seeds", Json::object());
    std::uint64_t s1 = seeds.value("tangent1", 11ULL);
    std::uint64_t s2 = seeds.value("tangent2", 22ULL);
    Trajectory tan1 = run.propagate_tangent(s1);
    Trajectory tan2 = run.propagate_tangent(s2);
    MsResidualStats ms = run.multisymplectic_residual(tan1, tan2);
    std::vector<double> res = run.residual_per_level();

    const Json thr = config.value("thresholds", Json::object());
    double thr_res = thr.value("scheme_residual", 1e-12);
    double thr_ms = thr.value("ms_residual_rel", 1e-9);

    std::string csv = csv_header();
    double res_max = 0.0;
    for (std::size_t j = 0; j < mesh.nt(); ++j) {
        res_max = std::max(res_max, res[j]);
        csv += csv_row(static_cast<long>(j), mesh.t(j + 1), res[j], ms.per_level_max[j],
                       ms.per_level_l2[j], 0.0);
    }

    IntegrateResult out;
    out.csv = std::move(csv);
    out.manifest = report_header("integrate", config, s1);
    out.manifest["scheme"] = scheme.name;
    Json sweep = Json::array();
    for (std::size_t idx : run.plan().order) sweep.push_back(scheme.equations[idx].name);
    out.manifest["sweep_order"] = std::move(sweep);
    out.manifest["sweep_fixed_point"] = run.plan().needs_fixed_point;
    Json mesh_info;
    mesh_info["nx"] = mesh.nx();
    mesh_info["nt"] = mesh.nt();
    mesh_info["t_step_ratio"] = mesh.max_step_ratio_t();
    out.manifest["mesh"] = std::move(mesh_info);
    Json seeds_out;
    seeds_out["tangent1"] = s1;
    seeds_out["tangent2"] = s2;
    out.manifest["seeds"] = std::move(seeds_out);
    Json summary;
    summary["max_scheme_residual"] = res_max;
    summary["ms_residual_max"] = ms.max_abs;
    summary["ms_residual_scale"] = ms.scale;
    summary["ms_residual_relative"] = ms.relative();
    out.manifest["summary"] = std::move(summary);
    out.thresholds_met = res_max <= thr_res && ms.relative() <= thr_ms;
    Json thresholds;
    thresholds["scheme_residual"] = thr_res;
    thresholds["ms_residual_rel"] = thr_ms;
    out.manifest["thresholds"] = std::move(thresholds);
    out.manifest["thresholds_met"] = out.thresholds_met;
    return out;
}

}  // namespace

IntegrateResult run_integration(const Json& config) {
    if (!config.contains("scheme"))
        throw Error(ErrorCode::ConfigError, "integration config needs a \"scheme\"");
    const std::string name = config.at("scheme").get<std::string>();
    if (name == "euler-b") return run_euler_b(config);
    return run_pde_scheme(config);
}

}  // namespace dvbx
