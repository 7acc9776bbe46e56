#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dvbx/error.hpp"
#include "dvbx/integrators.hpp"
#include "dvbx/multisymplectic.hpp"
#include "dvbx/operators.hpp"
#include "dvbx/parser.hpp"
#include "dvbx/reports.hpp"
#include "dvbx/scheme.hpp"

using namespace dvbx;

namespace {

Json wave_config(int nx, int nt, double hx, double ht) {
    return Json{{"scheme", "stormer-verlet-wave"},
                {"mesh", {{"nx", nx}, {"hx", hx}, {"nt", nt}, {"ht", ht}}},
                {"potential", "1 - cos(u)"},
                {"params", {{"eps", -1.0}}},
                {"initial",
                 {{"u", "sin(2*pi*x/L)"}, {"v", "0.5*cos(2*pi*x/L)"}, {"w", "0"}, {"p", "0"}}}};
}

}  // namespace

TEST_CASE("euler-b hand-computed step") {
    EulerBIntegrator integ(parse_expr("0.1*(q^2 + p^2)/2", EulerBIntegrator::mechanics_space()));
    CHECK(integ.separable());
    auto r = integ.step({1.0, 0.0}, 0);
    CHECK(r.next.p_prev == Catch::Approx(-0.1).margin(1e-15));
    CHECK(r.next.q == Catch::Approx(0.99).margin(1e-15));
    CHECK(r.implicit_residual <= 1e-15);
}

TEST_CASE("euler-b with zero Hamiltonian is the identity") {
    EulerBIntegrator integ(ScalarExpr{}, {});
    auto r = integ.step({2.5, -1.25}, 3);
    CHECK(r.next.q == 2.5);
    CHECK(r.next.p_prev == -1.25);
    double det = r.jacobian[0][0] * r.jacobian[1][1] - r.jacobian[0][1] * r.jacobian[1][0];
    CHECK(det == 1.0);
}

TEST_CASE("euler-b implicit solve handles coupled Hamiltonians") {
    // H with H_qp != 0 exercises the Newton path.
    EulerBIntegrator integ(
        parse_expr("0.05*(q^2*p + p^3/3 + q^2 + p^2)", EulerBIntegrator::mechanics_space()));
    CHECK_FALSE(integ.separable());
    EulerBIntegrator::State s{0.7, 0.2};
    auto r = integ.step(s, 0);
    CHECK(r.implicit_residual <= 1e-12);

    // The analytic Jacobian agrees with the finite-difference oracle.
    double fd[2][2];
    integ.fd_jacobian(s, 0, 1e-6, fd);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            CHECK(r.jacobian[a][b] == Catch::Approx(fd[a][b]).margin(1e-7));
}

TEST_CASE("euler-b symplecticity over many steps") {
    EulerBIntegrator integ(parse_expr("0.1*(q^2 + p^2)/2", EulerBIntegrator::mechanics_space()));
    EulerBIntegrator::State s{1.0, 0.0};
    EulerBIntegrator::Tangent t1{1.0, 0.0}, t2{0.0, 1.0};
    double omega0 = EulerBIntegrator::omega(t1, t2);
    double max_dev = 0.0, max_drift = 0.0;
    for (long n = 0; n < 2000; ++n) {
        auto r = integ.step(s, n);
        double det = r.jacobian[0][0] * r.jacobian[1][1] - r.jacobian[0][1] * r.jacobian[1][0];
        max_dev = std::max(max_dev, std::fabs(det - 1.0));
        // The map is affine, so central differences carry no truncation
        // error; a large step keeps rounding at the 1e-13 level.
        double fd[2][2];
        integ.fd_jacobian(s, n, 0.25, fd);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                CHECK(std::fabs(r.jacobian[a][b] - fd[a][b]) <= 1e-13);
        t1 = integ.push_tangent(r, t1);
        t2 = integ.push_tangent(r, t2);
        max_drift = std::max(max_drift,
                             std::fabs(EulerBIntegrator::omega(t1, t2) - omega0) / std::fabs(omega0));
        s = r.next;
    }
    CHECK(max_dev <= 1e-12);
    CHECK(max_drift <= 1e-10);
}

TEST_CASE("tangent propagation is linear and zero-preserving") {
    EulerBIntegrator integ(
        parse_expr("0.05*(q^2*p + p^3/3 + q^2 + p^2)", EulerBIntegrator::mechanics_space()));
    auto r = integ.step({0.4, -0.3}, 0);
    EulerBIntegrator::Tangent z{0.0, 0.0};
    auto pz = integ.push_tangent(r, z);
    CHECK(pz.dq == 0.0);
    CHECK(pz.dp_prev == 0.0);
    EulerBIntegrator::Tangent a{0.3, -0.7};
    auto pa = integ.push_tangent(r, a);
    auto p2a = integ.push_tangent(r, {0.6, -1.4});
    CHECK(p2a.dq == Catch::Approx(2 * pa.dq).margin(1e-14));
    CHECK(p2a.dp_prev == Catch::Approx(2 * pa.dp_prev).margin(1e-14));
}

TEST_CASE("wave scheme symbols match its variational structure") {
    // The scheme equations are the Euler-Lagrange system of the mesh
    // Lagrangian with local steps as named constants.
    Space s = Space{2, {"u", "v", "w", "p"}};
    auto P = [&s](const std::string& str) { return parse_expr(str, s); };
    ScalarExpr hx = ScalarExpr::symbol("hx"), ht = ScalarExpr::symbol("ht");
    ScalarExpr eps = ScalarExpr::symbol("eps");
    std::vector<std::vector<ScalarExpr>> L(2, std::vector<ScalarExpr>(4));
    L[0][0] = ht * P("w");              // x-direction, u
    L[0][1] = -(ht * P("p"));           // x-direction, v
    L[1][0] = hx * P("v");              // t-direction, u
    L[1][2] = eps * hx * P("p");        // t-direction, w
    ScalarExpr V = P("1 - cos(u)");
    ScalarExpr H = hx * ht * (V + (P("v^2") + eps * P("w^2")) * ScalarExpr(make_rational(1, 2)));
    DegenerateLagrangian mesh_lag(s, L, H);

    StencilScheme scheme = make_wave_scheme(V, -1.0);
    SourceForm el = el_system(mesh_lag);
    // Field alpha's variation produces the matching scheme equation scaled by
    // the cell area hx*ht.
    std::map<int, std::string> eq_of_field = {
        {0, "momentum"}, {1, "u-update"}, {2, "strain"}, {3, "w-update"}};
    for (const auto& [alpha, name] : eq_of_field) {
        const SchemeEquation* eq = nullptr;
        for (const auto& candidate : scheme.equations)
            if (candidate.name == name) eq = &candidate;
        REQUIRE(eq != nullptr);
        ScalarExpr residual = eq->residual;
        // make_wave_scheme bakes eps = -1 into numbers only through params;
        // the symbolic residual keeps eps, so the comparison is exact.
        CHECK(el.components[static_cast<std::size_t>(alpha)] == hx * ht * residual);
    }

    // The printed kappa tables match the d_v eta structure up to overall sign.
    MultisymplecticStructure st = structure(mesh_lag);
    Form kt(s), kx(s);
    for (const auto& term : scheme.kappa_t)
        kt += wedge(Form::term(s, WedgeMonomial::from_parts({}, {term.a}), ScalarExpr(1)),
                    Form::term(s, WedgeMonomial::from_parts({}, {term.b}), ScalarExpr(1))) *
              term.coefficient;
    for (const auto& term : scheme.kappa_x)
        kx += wedge(Form::term(s, WedgeMonomial::from_parts({}, {term.a}), ScalarExpr(1)),
                    Form::term(s, WedgeMonomial::from_parts({}, {term.b}), ScalarExpr(1))) *
              term.coefficient;
    // The printed form pairs kappa^t with the x one-form and kappa^x with
    // the t one-form; the d_v eta convention flips the overall sign.
    Form dx = Form::term(s, WedgeMonomial::from_parts({0}, {}), ScalarExpr(1));
    Form dt = Form::term(s, WedgeMonomial::from_parts({1}, {}), ScalarExpr(1));
    Form printed = wedge(kt * hx, dx) - wedge(kx * ht, dt);
    CHECK(st.omega == -printed);
}

TEST_CASE("zakharov scheme symbols match its variational structure") {
    Space s = Space{2, {"u", "v", "p", "q", "w", "psi", "phi"}};
    auto P = [&s](const std::string& str) { return parse_expr(str, s); };
    ScalarExpr hx = ScalarExpr::symbol("hx"), ht = ScalarExpr::symbol("ht");
    std::vector<std::vector<ScalarExpr>> L(2, std::vector<ScalarExpr>(7));
    L[0][2] = ht * P("u");    // x-direction, p
    L[0][3] = ht * P("v");    // x-direction, q
    L[0][4] = -(ht * P("phi"));  // x-direction, w
    L[1][1] = -(hx * P("u"));    // t-direction, v
    L[1][4] = hx * P("psi");     // t-direction, w
    ScalarExpr H = hx * ht *
                   (P("psi^2/2") - P("psi*(u^2 + v^2)") - P("(p^2 + q^2)/2") - P("phi^2/2"));
    DegenerateLagrangian mesh_lag(s, L, H);

    StencilScheme scheme = make_zakharov_scheme();
    SourceForm el = el_system(mesh_lag);
    std::map<int, std::string> eq_of_field = {{0, "v-update"},    {1, "u-update"},
                                              {2, "p-diagnostic"}, {3, "q-diagnostic"},
                                              {4, "psi-update"},   {5, "w-update"},
                                              {6, "phi-diagnostic"}};
    for (const auto& [alpha, name] : eq_of_field) {
        const SchemeEquation* eq = nullptr;
        for (const auto& candidate : scheme.equations)
            if (candidate.name == name) eq = &candidate;
        REQUIRE(eq != nullptr);
        CHECK(el.components[static_cast<std::size_t>(alpha)] == hx * ht * eq->residual);
    }

    MultisymplecticStructure st = structure(mesh_lag);
    Form kt(s), kx(s);
    for (const auto& term : scheme.kappa_t)
        kt += wedge(Form::term(s, WedgeMonomial::from_parts({}, {term.a}), ScalarExpr(1)),
                    Form::term(s, WedgeMonomial::from_parts({}, {term.b}), ScalarExpr(1))) *
              term.coefficient;
    for (const auto& term : scheme.kappa_x)
        kx += wedge(Form::term(s, WedgeMonomial::from_parts({}, {term.a}), ScalarExpr(1)),
                    Form::term(s, WedgeMonomial::from_parts({}, {term.b}), ScalarExpr(1))) *
              term.coefficient;
    Form dx = Form::term(s, WedgeMonomial::from_parts({0}, {}), ScalarExpr(1));
    Form dt = Form::term(s, WedgeMonomial::from_parts({1}, {}), ScalarExpr(1));
    Form printed = wedge(kt * hx, dx) - wedge(kx * ht, dt);
    CHECK(st.omega == -printed);
}

TEST_CASE("zero data stays zero for both PDE schemes") {
    for (const char* name : {"stormer-verlet-wave", "euler-box-zakharov"}) {
        Json cfg{{"scheme", name},
                 {"mesh", {{"nx", 8}, {"hx", 0.5}, {"nt", 16}, {"ht", 0.1}}},
                 {"potential", "0"},
                 {"initial", Json::object()}};
        auto result = run_integration(cfg);
        CHECK(result.manifest["summary"]["max_scheme_residual"].get<double>() == 0.0);
        CHECK(result.thresholds_met);
    }
}

TEST_CASE("wave sweep order and residuals") {
    Json cfg = wave_config(16, 32, 0.4, 0.1);
    StencilScheme scheme = make_wave_scheme(parse_expr("1 - cos(u)", Space{2, {"u", "v", "w", "p"}}),
                                            -1.0);
    SchemeRun run(scheme, Mesh::uniform(16, 32, 0.4, 0.1),
                  BoundaryCondition::Periodic,
                  {{"u", "sin(2*pi*x/L)"}, {"v", "0.5*cos(2*pi*x/L)"}});
    CHECK_FALSE(run.plan().needs_fixed_point);
    run.advance();
    CHECK(run.residual_max() <= 1e-12);

    auto result = run_integration(cfg);
    CHECK(result.thresholds_met);
}

TEST_CASE("wave dispersion matches the staggered leapfrog relation") {
    // With V(u) = u^2/2 and eps = -1 the auxiliary fields eliminate exactly
    // into the five-point leapfrog for u_tt - u_xx + u = 0, whose discrete
    // frequency obeys sin^2(w ht/2) = (ht^2/4)(1 + (4/hx^2) sin^2(k hx/2)).
    const int nx = 32, nt = 64;
    const double length = 2.0 * 3.14159265358979323846;
    const double hx = length / nx, ht = 0.05;
    Json cfg{{"scheme", "stormer-verlet-wave"},
             {"mesh", {{"nx", nx}, {"hx", hx}, {"nt", nt}, {"ht", ht}}},
             {"potential", "u^2/2"},
             {"params", {{"eps", -1.0}}},
             {"initial", {{"u", "cos(x)"}, {"v", "0"}, {"w", "0"}, {"p", "0"}}}};
    StencilScheme scheme =
        make_wave_scheme(parse_expr("u^2/2", Space{2, {"u", "v", "w", "p"}}), -1.0);
    SchemeRun run(scheme, Mesh::uniform(nx, nt, hx, ht), BoundaryCondition::Periodic,
                  {{"u", "cos(x)"}});
    run.advance();

    auto mode = [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < nx; ++i)
            acc += run.base().fields[0].at(i, j) * std::cos(hx * i);
        return 2.0 * acc / nx;
    };
    double kappa = 1.0;
    double s = std::sin(kappa * hx / 2.0);
    double rhs = (ht * ht / 4.0) * (1.0 + (4.0 / (hx * hx)) * s * s);
    double omega_theory = (2.0 / ht) * std::asin(std::sqrt(rhs));
    double cos_theory = std::cos(omega_theory * ht);
    // Any superposition of the two frequency branches satisfies the same
    // three-level recurrence, so a three-point fit is exact up to roundoff.
    for (int j = 8; j <= 24; ++j) {
        double fit = (mode(j + 1) + mode(j - 1)) / (2.0 * mode(j));
        CHECK(std::fabs(fit - cos_theory) <= 1e-10);
    }
}

TEST_CASE("multisymplectic residual is conserved and detects broken schemes") {
    Space wave_space{2, {"u", "v", "w", "p"}};
    ScalarExpr V = parse_expr("1 - cos(u)", wave_space);
    StencilScheme good = make_wave_scheme(V, -1.0);
    Mesh mesh = Mesh::uniform(24, 48, 0.3, 0.1);
    std::map<std::string, std::string> init{{"u", "sin(2*pi*x/L)"}, {"v", "0.2*cos(2*pi*x/L)"}};

    SchemeRun run(good, mesh, BoundaryCondition::Periodic, init);
    run.advance();
    Trajectory t1 = run.propagate_tangent(101);
    Trajectory t2 = run.propagate_tangent(202);
    auto stats = run.multisymplectic_residual(t1, t2);
    CHECK(stats.relative() <= 1e-9);

    // Zero tangents give a zero residual.
    Trajectory z1 = run.make_layout(), z2 = run.make_layout();
    auto zero_stats = run.multisymplectic_residual(run.propagate_tangent(std::move(z1)),
                                                   run.propagate_tangent(std::move(z2)));
    CHECK(zero_stats.max_abs == 0.0);

    // Control: evaluating the potential one site off destroys the
    // variational structure but not the sweep; the residual jumps by orders
    // of magnitude.
    StencilScheme broken = good;
    ScalarExpr vprime = partial(V, FiberCoord{0, MultiIndex{0, 0}});
    broken.equations[0].residual =
        parse_expr("-(v[0,0]-v[0,-1])/ht - (w[0,0]-w[-1,0])/hx", wave_space) -
        shift(vprime, MultiIndex{1, 0});
    SchemeRun bad(broken, mesh, BoundaryCondition::Periodic, init);
    bad.advance();
    auto bad_stats = bad.multisymplectic_residual(bad.propagate_tangent(101),
                                                  bad.propagate_tangent(202));
    CHECK(bad_stats.relative() > 1e5 * stats.relative());
    CHECK(bad.residual_max() <= 1e-12);  // still solves its own equations
}

TEST_CASE("zakharov run conserves multisymplecticity") {
    Json cfg{{"scheme", "euler-box-zakharov"},
             {"mesh", {{"nx", 32}, {"hx", 0.19634954084936207}, {"nt", 64}, {"ht", 0.002}}},
             {"initial",
              {{"u", "0.001*cos(2*pi*x/L)"},
               {"v", "0.001*sin(2*pi*x/L)"},
               {"w", "0"},
               {"psi", "0.001*cos(2*pi*x/L)"}}}};
    auto result = run_integration(cfg);
    CHECK(result.thresholds_met);
    CHECK(result.manifest["summary"]["max_scheme_residual"].get<double>() <= 1e-12);
    CHECK(result.manifest["summary"]["ms_residual_relative"].get<double>() <= 1e-9);
}

TEST_CASE("non-uniform meshes keep both properties") {
    Json tsteps = Json::array();
    for (int j = 0; j < 48; ++j) tsteps.push_back(j % 2 == 0 ? 0.05 : 0.1);
    Json cfg{{"scheme", "stormer-verlet-wave"},
             {"mesh", {{"nx", 24}, {"hx", 0.3}, {"t_steps", tsteps}}},
             {"potential", "1 - cos(u)"},
             {"params", {{"eps", -1.0}}},
             {"initial", {{"u", "sin(2*pi*x/L)"}, {"v", "0.2*cos(2*pi*x/L)"}}}};
    auto result = run_integration(cfg);
    CHECK(result.manifest["mesh"]["t_step_ratio"].get<double>() == Catch::Approx(2.0));
    CHECK(result.thresholds_met);
}

TEST_CASE("dirichlet boundaries freeze the ends") {
    Json cfg{{"scheme", "stormer-verlet-wave"},
             {"mesh", {{"nx", 12}, {"hx", 0.5}, {"nt", 10}, {"ht", 0.1}}},
             {"potential", "u^2/2"},
             {"bc", "dirichlet"},
             {"initial", Json::object()}};
    auto result = run_integration(cfg);
    CHECK(result.manifest["summary"]["max_scheme_residual"].get<double>() == 0.0);
}

TEST_CASE("mesh and config validation") {
    CHECK_THROWS_AS(Mesh::uniform(0, 4, 0.1, 0.1), Error);
    CHECK_THROWS_AS(Mesh::uniform(4, 4, -0.1, 0.1), Error);
    CHECK_THROWS_AS(Mesh::from_nodes({0.0, 0.0, 1.0}, {0.0, 1.0}), Error);
    Json bad{{"scheme", "stormer-verlet-wave"}, {"mesh", {{"nx", 4}, {"hx", 0.3}, {"nt", 0}, {"ht", 0.1}}}};
    CHECK_THROWS_AS(run_integration(bad), Error);
    Json unknown{{"scheme", "does-not-exist"}, {"mesh", Json::object()}};
    CHECK_THROWS_AS(run_integration(unknown), Error);
}

TEST_CASE("runs are deterministic for a fixed config") {
    Json cfg = wave_config(16, 24, 0.4, 0.1);
    auto a = run_integration(cfg);
    auto b = run_integration(cfg);
    CHECK(a.csv == b.csv);
    CHECK(a.manifest.dump() == b.manifest.dump());
}

TEST_CASE("non-uniform consistency report") {
    auto report = nonuniform_consistency(2024, 20);
    CHECK(report.mesh_operator_exact);
    CHECK(report.symbolic_cases > 0);
    CHECK(report.ratio_ok);
    CHECK(report.constant_residual == 0.0);
}
