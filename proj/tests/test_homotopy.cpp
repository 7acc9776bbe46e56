#include <catch2/catch_amalgamated.hpp>

#include "dvbx/error.hpp"
#include "dvbx/homotopy.hpp"
#include "dvbx/operators.hpp"
#include "dvbx/parser.hpp"
#include "dvbx/random_forms.hpp"

using namespace dvbx;

namespace {
const Space kLine{1, {"u"}};
const Space kPlane{2, {"u"}};

Form dvu(const Space& s, FiberCoord c) {
    return Form::term(s, WedgeMonomial::from_parts({}, {std::move(c)}), ScalarExpr(1));
}
}  // namespace

TEST_CASE("vertical homotopy on basic shapes") {
    Form sigma = wedge(dvu(kLine, {0, {0}}), vol(kLine));
    CHECK(h_vertical(sigma) == vol(kLine) * parse_expr("u[0]", kLine));
    CHECK(d_v(h_vertical(sigma)) == sigma);

    Form weighted = wedge(dvu(kLine, {0, {0}}), vol(kLine)) * parse_expr("u[0]", kLine);
    CHECK(h_vertical(weighted) == vol(kLine) * parse_expr("u[0]^2/2", kLine));
    CHECK(d_v(h_vertical(weighted)) == weighted);

    CHECK(h_vertical(Form(kLine)).is_zero());
}

TEST_CASE("vertical homotopy identity on random forms") {
    Rng rng(31);
    for (const Space& s : {kLine, kPlane}) {
        FormSampler sampler(s, rng);
        for (int l = 1; l <= 2; ++l) {
            for (int c = 0; c < 25; ++c) {
                Form sigma = sampler.sample_form({s.base_dim, l});
                CHECK((d_v(h_vertical(sigma)) + h_vertical(d_v(sigma))) == sigma);
            }
        }
    }
}

TEST_CASE("vertical homotopy rejects non-polynomial coefficients") {
    Form bad = wedge(dvu(kLine, {0, {0}}), vol(kLine)) * parse_expr("ln(u[0])", kLine);
    try {
        h_vertical(bad);
        FAIL("expected a non-polynomial error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NonPolynomial);
        CHECK(std::string(err.what()).find("ln") != std::string::npos);
    }
}

TEST_CASE("F operators") {
    // With J = 0 they assemble the interior Euler projection.
    Rng rng(33);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 20; ++c) {
        Form sigma = sampler.sample_form({2, 1});
        MultiIndex lo{0, 0};
        for (const auto& [m, f] : sigma.terms())
            for (const auto& fc : m.vertical())
                for (std::size_t i = 0; i < 2; ++i) lo[i] = std::min(lo[i], fc.offset[i]);
        for (const auto& fc : [&sigma] {
                 std::set<FiberCoord> s0;
                 for (const auto& [m, f] : sigma.terms())
                     for (const auto& c2 : fiber_support(f)) s0.insert(c2);
                 return s0;
             }())
            for (std::size_t i = 0; i < 2; ++i) lo[i] = std::min(lo[i], fc.offset[i]);
        Form translated = shift_form(sigma, -lo);

        Form assembled(kPlane);
        MultiIndex zero{0, 0};
        assembled += wedge(dvu(kPlane, {0, zero}), f_operator(translated, 0, zero));
        CHECK(assembled == interior_euler(translated));
    }

    CHECK(f_operator(vol(kPlane), 0, MultiIndex{0, 0}).is_zero());

    Form negative = wedge(dvu(kPlane, {0, {-1, 0}}), vol(kPlane));
    CHECK_THROWS_AS(f_operator(negative, 0, MultiIndex{0, 0}), Error);
    CHECK_THROWS_AS(f_operator(vol(kPlane), 0, MultiIndex{-1, 0}), Error);
}

TEST_CASE("horizontal homotopy identities") {
    Rng rng(35);
    // Interior columns: h(d_h s) + d_h(h s) = s.
    {
        Space s{2, {"u", "v"}};
        FormSampler sampler(s, rng);
        for (int c = 0; c < 25; ++c) {
            Form sigma = sampler.sample_form({1, 1});
            CHECK((h_horizontal(d_h(sigma)) + d_h(h_horizontal(sigma))) == sigma);
        }
    }
    // k = 0 convention: the identity degenerates to h(d_h s) = s.
    {
        FormSampler sampler(kPlane, rng);
        for (int c = 0; c < 25; ++c) {
            Form sigma = sampler.sample_form({0, 1});
            Form dh = d_h(sigma);
            if (dh.is_zero()) continue;
            CHECK(h_horizontal(dh) == sigma);
        }
    }
    // Right edge: sigma = I(sigma) + d_h h(sigma).
    {
        FormSampler sampler(kPlane, rng);
        for (int c = 0; c < 25; ++c) {
            Form sigma = sampler.sample_form({2, 1});
            CHECK((interior_euler(sigma) + d_h(h_horizontal(sigma))) == sigma);
        }
    }
    CHECK(h_horizontal(Form(kPlane)).is_zero());
}

TEST_CASE("reconstruction of closed forms") {
    // Vertically closed (0,2)-form from the mechanics pattern.
    Form sigma = wedge(dvu(kLine, {0, {-1}}), dvu(kLine, {0, {0}}));
    Form tau = reconstruct_closed(sigma, ComplexDirection::Vertical);
    CHECK(d_v(tau) == sigma);

    // Horizontal round trip.
    Rng rng(37);
    FormSampler sampler(kPlane, rng);
    for (int c = 0; c < 10; ++c) {
        Form tau0 = sampler.sample_form({0, 1});
        Form image = d_h(tau0);
        if (image.is_zero()) continue;
        Form back = reconstruct_closed(image, ComplexDirection::Horizontal);
        CHECK(d_h(back) == image);
    }

    // A source form has a nonzero projection: certified non-exact.
    Form source = wedge(dvu(kLine, {0, {0}}), vol(kLine));
    try {
        reconstruct_closed(source, ComplexDirection::Horizontal);
        FAIL("expected a closedness error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotClosed);
    }

    Form open = dvu(kLine, {0, {0}}) * parse_expr("u[1]", kLine);
    CHECK_THROWS_AS(reconstruct_closed(open, ComplexDirection::Vertical), Error);
}

TEST_CASE("edge homotopy certifies exactness in the source column") {
    Rng rng(39);
    FormSampler sampler(kPlane, rng);
    int exercised = 0;
    for (int c = 0; c < 40 && exercised < 10; ++c) {
        Form f1 = interior_euler(sampler.sample_form({2, 1}));
        if (f1.is_zero()) continue;
        Form omega = delta_v(f1);
        if (omega.is_zero()) continue;
        ++exercised;
        CHECK(delta_v(edge_homotopy(omega)) == omega);
    }
    CHECK(exercised > 0);
}

TEST_CASE("inverse variational problem") {
    LagrangianForm laplace(kPlane,
                           parse_expr("u[0,0]*(u[1,0] + u[0,1] - 2*u[0,0])", kPlane));
    SourceForm e = euler_lagrange(laplace);
    LagrangianForm rebuilt = inverse_variational(e);
    CHECK(euler_lagrange(rebuilt).as_form() == e.as_form());

    SourceForm bad(kLine, {parse_expr("u[1]", kLine)});
    try {
        inverse_variational(bad);
        FAIL("expected a Helmholtz failure");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::HelmholtzFailed);
    }

    SourceForm zero(kLine, {ScalarExpr()});
    CHECK(inverse_variational(zero).density.is_zero());
}
