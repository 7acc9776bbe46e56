#include <catch2/catch_amalgamated.hpp>

#include "dvbx/error.hpp"
#include "dvbx/parser.hpp"
#include "dvbx/random_forms.hpp"
#include "dvbx/scalar_expr.hpp"

using namespace dvbx;

namespace {
const Space kLine{1, {"u"}};
const Space kPlane{2, {"u"}};

ScalarExpr L(const std::string& s) { return parse_expr(s, kLine); }
ScalarExpr P(const std::string& s) { return parse_expr(s, kPlane); }
}  // namespace

TEST_CASE("partial derivative treats shifted variables as independent") {
    CHECK(partial(L("u[0]^2*u[1]"), {0, {0}}) == L("2*u[0]*u[1]"));
    CHECK(partial(P("u[1,0] + u[0,1]"), {0, {0, 0}}).is_zero());

    // d/du of C ln(u) is C/u.
    ScalarExpr f = P("C*ln(u[0,0])");
    CHECK(partial(f, {0, {0, 0}}) == P("C*u[0,0]^(-1)"));
}

TEST_CASE("partial through the function chain rule") {
    CHECK(partial(L("sin(u[0])"), {0, {0}}) == L("cos(u[0])"));
    CHECK(partial(L("cos(u[0])"), {0, {0}}) == L("-sin(u[0])"));
    CHECK(partial(L("exp(2*u[0])"), {0, {0}}) == L("2*exp(2*u[0])"));
    // ln of a sum has no derivative inside the algebra.
    CHECK_THROWS_AS(partial(L("ln(u[0] + u[1])"), FiberCoord{0, {0}}), Error);
}

TEST_CASE("shift translates base and fiber coordinates") {
    CHECK(shift(P("u[0,0]*u[1,0]"), {-1, 0}) == P("u[-1,0]*u[0,0]"));
    CHECK(shift(P("n1*u[0,0]"), {1, 1}) == P("(n1 + 1)*u[1,1]"));
    CHECK(shift(L("sin(u[0])"), {2}) == L("sin(u[2])"));

    // Group law S_J S_K = S_{J+K} on random polynomials.
    Rng rng(7);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 50; ++c) {
        ScalarExpr f = sampler.sample_polynomial();
        MultiIndex J = sampler.sample_coord().offset;
        MultiIndex K = sampler.sample_coord().offset;
        CHECK(shift(shift(f, J), K) == shift(f, J + K));
    }
}

TEST_CASE("shift and partial satisfy the compatibility identity") {
    Rng rng(11);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 50; ++c) {
        ScalarExpr f = sampler.sample_polynomial();
        FiberCoord x = sampler.sample_coord();
        MultiIndex K = sampler.sample_coord().offset;
        CHECK(shift(partial(f, x), K) == partial(shift(f, K), FiberCoord{x.alpha, x.offset + K}));
    }
}

TEST_CASE("normalization is idempotent and cancels exactly") {
    Rng rng(3);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 100; ++c) {
        ScalarExpr f = sampler.sample_polynomial();
        ScalarExpr g = sampler.sample_polynomial();
        CHECK((f - f).is_zero());
        CHECK((f + g) - g == f);
    }
}

TEST_CASE("evaluate") {
    EvalContext ctx;
    ctx.fiber[{0, {0}}] = 2.0;
    CHECK(evaluate(L("u[0]^2 + 1"), ctx) == 5.0);

    // A constant field solves the discrete Laplace equation.
    EvalContext flat;
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) flat.fiber[{0, {di, dj}}] = 3.0;
    CHECK(evaluate(P("u[1,0] + u[-1,0] + u[0,1] + u[0,-1] - 4*u[0,0]"), flat) == 0.0);

    EvalContext neg;
    neg.fiber[{0, {0}}] = -1.0;
    CHECK_THROWS_AS(evaluate(L("ln(u[0])"), neg), Error);

    EvalContext empty;
    try {
        evaluate(L("u[3]"), empty, &kLine);
        FAIL("expected a missing-assignment error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::MissingAssignment);
        CHECK(std::string(err.what()).find("u[3]") != std::string::npos);
    }
}

TEST_CASE("negative powers need monomial bases") {
    CHECK(L("u[0]").pow(-2) == L("u[0]^(-2)"));
    CHECK(L("u[0]^(-1)*u[0]") == ScalarExpr(1));
    CHECK_THROWS_AS(L("u[0] + u[1]").pow(-1), Error);
    CHECK_THROWS_AS(ScalarExpr(0).pow(-1), Error);
}

TEST_CASE("fiber support and polynomial detection") {
    auto support = fiber_support(P("u[1,0]*sin(u[0,-1]) + n1"));
    CHECK(support.size() == 2);
    CHECK(support.count({0, {1, 0}}) == 1);
    CHECK(support.count({0, {0, -1}}) == 1);

    std::string offending;
    CHECK(is_fiber_polynomial(P("u[0,0]^3 + n1*u[1,0]")));
    CHECK_FALSE(is_fiber_polynomial(P("ln(u[0,0])"), &offending));
    CHECK(offending.find("ln") != std::string::npos);
    CHECK_FALSE(is_fiber_polynomial(P("u[0,0]^(-1)")));
}

TEST_CASE("multi-index binomials") {
    CHECK(binomial(MultiIndex{2, 1}, MultiIndex{1, 1}) == make_rational(2));
    CHECK(binomial(MultiIndex{3, 2}, MultiIndex{1, 0}) == make_rational(3));
    CHECK_THROWS_AS(binomial(MultiIndex{1}, MultiIndex{2}), Error);
    CHECK_THROWS_AS(binomial(MultiIndex{1, -1}, MultiIndex{0, -1}), Error);
}

TEST_CASE("rendering round-trips through the parser") {
    Rng rng(23);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 30; ++c) {
        ScalarExpr f = sampler.sample_polynomial() - sampler.sample_polynomial();
        CHECK(parse_expr(f.to_string(&kPlane), kPlane) == f);
    }
    ScalarExpr g = P("C*u[0,0]^(-1) - sin(n1*u[1,0])/3");
    CHECK(parse_expr(g.to_string(&kPlane), kPlane) == g);
}
