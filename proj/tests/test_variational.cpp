#include <catch2/catch_amalgamated.hpp>

#include "dvbx/error.hpp"
#include "dvbx/parser.hpp"
#include "dvbx/random_forms.hpp"
#include "dvbx/variational.hpp"

using namespace dvbx;

namespace {
const Space kLine{1, {"u"}};
const Space kPlane{2, {"u"}};
const Space kMech{1, {"q", "p"}};

Form dvu(const Space& s, FiberCoord c) {
    return Form::term(s, WedgeMonomial::from_parts({}, {std::move(c)}), ScalarExpr(1));
}

const char* kLaplaceDensity = "u[0,0]*(u[1,0] + u[0,1] - 2*u[0,0])";
const char* kLaplaceEquation = "u[1,0] + u[-1,0] + u[0,1] + u[0,-1] - 4*u[0,0]";
}  // namespace

TEST_CASE("interior Euler projection") {
    // Source forms are fixed points.
    Form source = wedge(dvu(kLine, {0, {0}}), vol(kLine)) * parse_expr("sin(u[0])", kLine);
    CHECK(interior_euler(source) == source);

    // Summation by parts walks the shifted factor home.
    Form sigma = wedge(dvu(kLine, {0, {1}}), vol(kLine)) * parse_expr("u[0]", kLine);
    Form expected = wedge(dvu(kLine, {0, {0}}), vol(kLine)) * parse_expr("u[-1]", kLine);
    CHECK(interior_euler(sigma) == expected);

    CHECK_THROWS_AS(interior_euler(vol(kLine)), Error);           // l = 0
    CHECK_THROWS_AS(interior_euler(dvu(kPlane, {0, {0, 0}})), Error);  // k < p
}

TEST_CASE("Euler-Lagrange operator") {
    SourceForm laplace = euler_lagrange(LagrangianForm(kPlane, parse_expr(kLaplaceDensity, kPlane)));
    CHECK(laplace.components[0] == parse_expr(kLaplaceEquation, kPlane));

    CHECK(euler_lagrange(LagrangianForm(kPlane, ScalarExpr(42))).is_zero());

    SourceForm chain = euler_lagrange(LagrangianForm(kLine, parse_expr("(u[1] - u[0])^2/2", kLine)));
    CHECK(chain.components[0] == parse_expr("-(u[1] - 2*u[0] + u[-1])", kLine));

    // E agrees with the projection route I(d_v L).
    Rng rng(12);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 20; ++c) {
        LagrangianForm L(kPlane, sampler.sample_polynomial());
        CHECK(euler_lagrange(L).as_form() == interior_euler(d_v(L.as_form())));
    }
}

TEST_CASE("delta_v and the Helmholtz obstruction") {
    Rng rng(14);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 20; ++c) {
        SourceForm e = euler_lagrange(LagrangianForm(kPlane, sampler.sample_polynomial()));
        if (e.is_zero()) continue;
        CHECK(delta_v(e.as_form()).is_zero());
    }

    Form bad = wedge(dvu(kLine, {0, {0}}), vol(kLine)) * parse_expr("u[1]", kLine);
    CHECK_FALSE(delta_v(bad).is_zero());

    Form not_fixed = wedge(dvu(kLine, {0, {1}}), vol(kLine)) * parse_expr("u[0]", kLine);
    try {
        delta_v(not_fixed);
        FAIL("expected a fixed-point error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotAFixedPoint);
    }
}

TEST_CASE("boundary term") {
    // Already a source form: any valid tau has d_h tau = 0.
    Form source = wedge(dvu(kLine, {0, {0}}), vol(kLine)) * parse_expr("u[0]^3", kLine);
    CHECK(d_h(boundary_term(source)).is_zero());

    Form sigma = wedge(dvu(kLine, {0, {1}}), vol(kLine)) * parse_expr("u[0]", kLine);
    Form tau = boundary_term(sigma);
    CHECK(d_h(tau) == interior_euler(sigma) - sigma);
    // The hand witness: tau = u_{-1} dv u_0 satisfies the same relation.
    Form witness = dvu(kLine, {0, {0}}) * parse_expr("u[-1]", kLine);
    CHECK(d_h(witness) == interior_euler(sigma) - sigma);

    // Mechanics Lagrangian: the boundary term is p_{-1} dv q_0 regardless of
    // the (unshifted) Hamiltonian.
    for (const char* h : {"(q[0]^2 + p[0]^2)/2", "q[0]^2*p[0] + p[0]^3/3 + C*q[0]"}) {
        ScalarExpr density = parse_expr("p[0]*(q[1] - q[0])", kMech) - parse_expr(h, kMech);
        Form tau_m = boundary_term(d_v(LagrangianForm(kMech, density).as_form()));
        CHECK(tau_m == dvu(kMech, {0, {0}}) * parse_expr("p[-1]", kMech));
    }
}

TEST_CASE("divergence inversion") {
    // Telescoping.
    {
        auto F = divergence_invert(kLine, parse_expr("u[1] - u[0]", kLine));
        CHECK(shift(F[0], {1}) - F[0] == parse_expr("u[1] - u[0]", kLine));
    }
    // Two-dimensional product telescoping.
    {
        Space s{2, {"u", "v"}};
        ScalarExpr f = parse_expr("u[1,0]*v[1,0] - u[0,0]*v[0,0]", s);
        auto F = divergence_invert(s, f);
        ScalarExpr back = (shift(F[0], {1, 0}) - F[0]) + (shift(F[1], {0, 1}) - F[1]);
        CHECK(back == f);
    }
    // Zero and constants.
    {
        auto F = divergence_invert(kPlane, ScalarExpr());
        CHECK(F[0].is_zero());
        CHECK(F[1].is_zero());
        auto G = divergence_invert(kLine, ScalarExpr(3));
        CHECK(shift(G[0], {1}) - G[0] == ScalarExpr(3));
    }
    // Non-divergences are rejected up front.
    try {
        divergence_invert(kLine, parse_expr("u[0]^2", kLine));
        FAIL("expected a precondition error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::PreconditionFailed);
    }
}

TEST_CASE("variational symmetry check") {
    LagrangianForm laplace(kPlane, parse_expr(kLaplaceDensity, kPlane));
    VectorField unit(kPlane, {ScalarExpr(1)});
    SymmetryCheck sym = is_variational_symmetry(laplace, unit);
    CHECK(sym.is_symmetry);
    REQUIRE(sym.certificate.has_value());
    CHECK(d_h(*sym.certificate) ==
          contract(unit, d_v(laplace.as_form())));

    VectorField zero(kPlane, {ScalarExpr()});
    SymmetryCheck trivial = is_variational_symmetry(laplace, zero);
    CHECK(trivial.is_symmetry);
    CHECK(trivial.certificate->is_zero());

    LagrangianForm quad(kLine, parse_expr("u[0]^2", kLine));
    VectorField shift_unit(kLine, {ScalarExpr(1)});
    CHECK_FALSE(is_variational_symmetry(quad, shift_unit).is_symmetry);
}

TEST_CASE("Noether conservation laws") {
    LagrangianForm laplace(kPlane, parse_expr(kLaplaceDensity, kPlane));
    VectorField unit(kPlane, {ScalarExpr(1)});
    ConservationLaw law = noether(laplace, unit);
    CHECK(law.verified);
    CHECK(d_h(law.lambda) == contract(unit, euler_lagrange(laplace).as_form()));
    CHECK(law.divergence == law.characteristic_pairing);

    // Compared through divergences, the law agrees with the classical
    // component pair (u_{0,-1}-u_{0,0}, u_{0,0}-u_{-1,0}) exactly.
    Form classical = Form::term(kPlane, WedgeMonomial::from_parts({0}, {}),
                                parse_expr("u[0,-1] - u[0,0]", kPlane)) +
                     Form::term(kPlane, WedgeMonomial::from_parts({1}, {}),
                                parse_expr("u[0,0] - u[-1,0]", kPlane));
    CHECK(d_h(law.lambda) == d_h(classical));

    ConservationLaw none = noether(laplace, VectorField(kPlane, {ScalarExpr()}));
    CHECK(d_h(none.lambda).is_zero());

    LagrangianForm chain(kLine, parse_expr("(u[1] - u[0])^2/2 - u[0]^2/2", kLine));
    try {
        noether(chain, VectorField(kLine, {ScalarExpr(1)}));
        FAIL("expected a precondition failure");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::PreconditionFailed);
    }
}

TEST_CASE("source form round trip and validation") {
    SourceForm e(kPlane, {parse_expr(kLaplaceEquation, kPlane)});
    CHECK(SourceForm::from_form(e.as_form()).components[0] == e.components[0]);

    Form shifted = wedge(dvu(kPlane, {0, {1, 0}}), vol(kPlane));
    CHECK_THROWS_AS(SourceForm::from_form(shifted), Error);
}
