#include "dvbx/checks.hpp"

#include <functional>
#include <optional>

#include "dvbx/error.hpp"
#include "dvbx/homotopy.hpp"
#include "dvbx/multisymplectic.hpp"
#include "dvbx/operators.hpp"
#include "dvbx/random_forms.hpp"
#include "dvbx/variational.hpp"

namespace dvbx {

namespace {

/// d_v with the canonicalization sign dropped; used only to prove that the
/// battery catches a broken operator.
Form dv_sign_bug(const Form& sigma) {
    Form out(sigma.space());
    for (const auto& [m, f] : sigma.terms()) {
        for (const auto& c : fiber_support(f)) {
            ScalarExpr df = partial(f, c);
            if (df.is_zero()) continue;
            std::vector<WedgeLetter> seq;
            seq.push_back(WedgeLetter::vertical(c));
            auto rest = m.letters();
            seq.insert(seq.end(), rest.begin(), rest.end());
            auto canon = WedgeMonomial::canonicalize(std::move(seq));
            if (!canon) continue;
            out.add_term(canon->first, df);
        }
    }
    return out;
}

using DegreesFn = std::function<std::vector<Bidegree>(const Space&)>;
using CaseFn = std::function<std::optional<std::string>(Rng&, FormSampler&, Bidegree)>;

DegreesFn all_degrees(int lmin, int lmax, int kmax_rel = 0, int kmin = 0) {
    return [=](const Space& s) {
        std::vector<Bidegree> out;
        for (int k = kmin; k <= s.base_dim + kmax_rel; ++k)
            for (int l = lmin; l <= lmax; ++l) out.push_back({k, l});
        return out;
    };
}

DegreesFn top_degrees(int lmin, int lmax) {
    return [=](const Space& s) {
        std::vector<Bidegree> out;
        for (int l = lmin; l <= lmax; ++l) out.push_back({s.base_dim, l});
        return out;
    };
}

DegreesFn single_slot() {
    return [](const Space&) { return std::vector<Bidegree>{{0, 0}}; };
}

struct Battery {
    const CheckOptions& opt;
    Rng rng;
    std::vector<CheckOutcome> results;
    std::function<Form(const Form&)> dv;

    explicit Battery(const CheckOptions& o)
        : opt(o), rng(o.seed), dv(o.inject == CheckOptions::Inject::DvSign
                                      ? std::function<Form(const Form&)>(dv_sign_bug)
                                      : std::function<Form(const Form&)>(
                                            [](const Form& s) { return d_v(s); })) {}

    static std::vector<Space> spaces() {
        std::vector<Space> out;
        for (int p = 1; p <= 3; ++p) {
            out.push_back(Space{p, {"u"}});
            out.push_back(Space{p, {"u", "v"}});
        }
        return out;
    }

    void run(const std::string& name, const DegreesFn& degrees, const CaseFn& fn) {
        CheckOutcome outcome;
        outcome.name = name;
        for (const auto& space : spaces()) {
            FormSampler sampler(space, rng);
            for (const auto& b : degrees(space)) {
                for (int c = 0; c < opt.cases && outcome.pass; ++c) {
                    ++outcome.cases;
                    auto failure = fn(rng, sampler, b);
                    if (failure) {
                        outcome.pass = false;
                        outcome.counterexample =
                            "p=" + std::to_string(space.base_dim) +
                            " q=" + std::to_string(space.fiber_dim()) + " (k,l)=(" +
                            std::to_string(b.k) + "," + std::to_string(b.l) + "): " + *failure;
                    }
                }
                if (!outcome.pass) break;
            }
            if (!outcome.pass) break;
        }
        results.push_back(std::move(outcome));
    }
};

std::optional<std::string> expect_zero(const Form& residual, const Form& input) {
    if (residual.is_zero()) return std::nullopt;
    return "input " + input.to_string() + " left residual " + residual.to_string();
}

}  // namespace

std::vector<CheckOutcome> run_identity_battery(const CheckOptions& opt) {
    Battery bat(opt);
    const auto& dv = bat.dv;

    // --- kernel compatibility --------------------------------------------
    bat.run("shift_partial_compatibility", single_slot(),
            [](Rng&, FormSampler& s, Bidegree) -> std::optional<std::string> {
                ScalarExpr f = s.sample_polynomial();
                FiberCoord c = s.sample_coord();
                MultiIndex K = s.sample_coord().offset;
                FiberCoord shifted{c.alpha, c.offset + K};
                ScalarExpr lhs = shift(partial(f, c), K);
                ScalarExpr rhs = partial(shift(f, K), shifted);
                if (lhs == rhs) return std::nullopt;
                return "f=" + f.to_string() + " c=" + c.to_string() + " K=" + K.to_string();
            });

    // --- exterior algebra --------------------------------------------------
    bat.run("wedge_graded_commutativity", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Bidegree b2{s.space().base_dim > b.k ? b.k + 1 : b.k, b.l > 0 ? b.l - 1 : b.l};
                Form a = s.sample_form(b);
                Form c = s.sample_form(b2);
                int sign = ((b.k + b.l) * (b2.k + b2.l)) % 2 == 0 ? 1 : -1;
                Form lhs = wedge(a, c);
                Form rhs = wedge(c, a);
                if (sign < 0) rhs = -rhs;
                return expect_zero(lhs - rhs, a);
            });

    bat.run("wedge_associativity", all_degrees(0, 1, -1),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form a = s.sample_form(b);
                Form c = s.sample_form({0, 1});
                Form d = s.sample_form({1, 0});
                return expect_zero(wedge(wedge(a, c), d) - wedge(a, wedge(c, d)), a);
            });

    bat.run("interior_antiderivation", all_degrees(0, 2, -1),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form a = s.sample_form(b);
                Form c = s.sample_form({1, b.l > 0 ? b.l - 1 : 0});
                FrameVector x = (b.l > 0) ? FrameVector::fiber_dual(s.sample_coord())
                                          : FrameVector::base_dual(0);
                int deg = b.k + b.l;
                Form lhs = interior(x, wedge(a, c));
                Form rhs = wedge(interior(x, a), c);
                Form second = wedge(a, interior(x, c));
                rhs += (deg % 2 == 0) ? second : -second;
                return expect_zero(lhs - rhs, a);
            });

    bat.run("interior_nilpotent", all_degrees(1, 2, 0, 1),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form a = s.sample_form(b);
                FrameVector x = FrameVector::fiber_dual(s.sample_coord());
                return expect_zero(interior(x, interior(x, a)), a);
            });

    // --- cochain identities --------------------------------------------------
    bat.run("dv_squared", all_degrees(0, 2),
            [&dv](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                return expect_zero(dv(dv(sigma)), sigma);
            });

    bat.run("dh_squared", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                return expect_zero(d_h(d_h(sigma)), sigma);
            });

    bat.run("dh_dv_anticommute", all_degrees(0, 2),
            [&dv](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                return expect_zero(d_h(dv(sigma)) + dv(d_h(sigma)), sigma);
            });

    bat.run("dtotal_squared", all_degrees(0, 2),
            [&dv](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                Form once = d_h(sigma) + dv(sigma);
                return expect_zero(d_h(once) + dv(once), sigma);
            });

    // --- shift commutation ----------------------------------------------------
    bat.run("shift_dv_commute", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                MultiIndex K = s.sample_coord().offset;
                return expect_zero(shift_form(d_v(sigma), K) - d_v(shift_form(sigma, K)), sigma);
            });

    bat.run("shift_dh_commute", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                MultiIndex K = s.sample_coord().offset;
                return expect_zero(shift_form(d_h(sigma), K) - d_h(shift_form(sigma, K)), sigma);
            });

    bat.run("shift_contract_commute", all_degrees(1, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                // Prolonged vertical fields are shift-equivariant, so the
                // same characteristic serves on both sides.
                Form sigma = s.sample_form(b);
                MultiIndex K = s.sample_coord().offset;
                VectorField v(s.space(), s.sample_characteristic());
                return expect_zero(shift_form(contract(v, sigma), K) -
                                       contract(v, shift_form(sigma, K)),
                                   sigma);
            });

    // --- Cartan-type identities -------------------------------------------
    bat.run("cartan_horizontal", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                VectorField v(s.space(), s.sample_characteristic());
                return expect_zero(contract(v, d_h(sigma)) + d_h(contract(v, sigma)), sigma);
            });

    bat.run("cartan_vertical_dual", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                for (int i = 0; i < s.space().base_dim; ++i) {
                    FrameVector x = FrameVector::base_dual(i);
                    Form r = interior(x, d_v(sigma)) + d_v(interior(x, sigma));
                    if (!r.is_zero()) return expect_zero(r, sigma);
                }
                return std::nullopt;
            });

    bat.run("lie_difference_cartan", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                for (int i = 0; i < s.space().base_dim; ++i) {
                    FrameVector x = FrameVector::base_dual(i);
                    Form r = interior(x, d_h(sigma)) + d_h(interior(x, sigma)) -
                             lie_difference(sigma, i);
                    if (!r.is_zero()) return expect_zero(r, sigma);
                }
                return std::nullopt;
            });

    bat.run("lie_difference_cartan_total", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                for (int i = 0; i < s.space().base_dim; ++i) {
                    FrameVector x = FrameVector::base_dual(i);
                    Form r = interior(x, d_total(sigma)) + d_total(interior(x, sigma)) -
                             lie_difference(sigma, i);
                    if (!r.is_zero()) return expect_zero(r, sigma);
                }
                return std::nullopt;
            });

    bat.run("lie_derivative_cartan_total", all_degrees(0, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                VectorField v(s.space(), s.sample_characteristic());
                Form r = contract(v, d_total(sigma)) + d_total(contract(v, sigma)) -
                         lie_derivative(v, sigma);
                return expect_zero(r, sigma);
            });

    // --- projection and edge -----------------------------------------------
    bat.run("interior_euler_projection", top_degrees(1, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                Form once = interior_euler(sigma);
                return expect_zero(interior_euler(once) - once, sigma);
            });

    bat.run("interior_euler_kills_dh", top_degrees(1, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form({s.space().base_dim - 1, b.l});
                Form image = d_h(sigma);
                if (image.is_zero()) return std::nullopt;
                return expect_zero(interior_euler(image), sigma);
            });

    bat.run("euler_lagrange_kills_divergences", single_slot(),
            [](Rng&, FormSampler& s, Bidegree) -> std::optional<std::string> {
                Form sigma = s.sample_form({s.space().base_dim - 1, 0});
                Form div = d_h(sigma);
                if (div.is_zero()) return std::nullopt;
                ScalarExpr density = div.terms().begin()->second;
                SourceForm e = euler_lagrange(LagrangianForm(s.space(), density));
                return expect_zero(e.as_form(), sigma);
            });

    bat.run("delta_v_of_euler_lagrange", single_slot(),
            [](Rng&, FormSampler& s, Bidegree) -> std::optional<std::string> {
                ScalarExpr density = s.sample_polynomial();
                SourceForm e = euler_lagrange(LagrangianForm(s.space(), density));
                if (e.is_zero()) return std::nullopt;
                return expect_zero(delta_v(e.as_form()), e.as_form());
            });

    bat.run("delta_v_squared", single_slot(),
            [](Rng&, FormSampler& s, Bidegree) -> std::optional<std::string> {
                Form sigma = s.sample_form({s.space().base_dim, 1});
                Form omega = interior_euler(sigma);
                if (omega.is_zero()) return std::nullopt;
                Form once = delta_v(omega);
                if (once.is_zero()) return std::nullopt;
                return expect_zero(delta_v(once), omega);
            });

    // --- homotopy operators --------------------------------------------------
    bat.run("vertical_homotopy", all_degrees(1, 2),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                Form r = d_v(h_vertical(sigma)) + h_vertical(d_v(sigma)) - sigma;
                return expect_zero(r, sigma);
            });

    bat.run("horizontal_homotopy_interior", all_degrees(1, 2, -1, 1),
            [](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                Form sigma = s.sample_form(b);
                Form r = h_horizontal(d_h(sigma)) + d_h(h_horizontal(sigma)) - sigma;
                return expect_zero(r, sigma);
            });

    {
        // At the right edge the operative identity is the projector-corrected
        // one; also record whether the plain homotopy identity survived on the
        // sampled corpus.
        bool plain_held = true;
        bat.run("horizontal_homotopy_right_edge", top_degrees(1, 2),
                [&plain_held](Rng&, FormSampler& s, Bidegree b) -> std::optional<std::string> {
                    Form sigma = s.sample_form(b);
                    Form h = h_horizontal(sigma);
                    Form corrected = interior_euler(sigma) + d_h(h) - sigma;
                    if (plain_held) {
                        Form plain = h_horizontal(d_h(sigma)) + d_h(h) - sigma;
                        if (!plain.is_zero()) plain_held = false;
                    }
                    return expect_zero(corrected, sigma);
                });
        bat.results.back().note =
            plain_held ? "k=p: the plain homotopy identity also held on this corpus"
                       : "k=p: sigma = I(sigma) + d_h h(sigma) holds; the plain homotopy "
                         "identity fails for forms outside im(d_h)";
    }

    bat.run("edge_homotopy", single_slot(),
            [](Rng&, FormSampler& s, Bidegree) -> std::optional<std::string> {
                Form sigma = s.sample_form({s.space().base_dim, 1});
                Form f1 = interior_euler(sigma);
                if (f1.is_zero()) return std::nullopt;
                Form omega = delta_v(f1);  // lands in F^2, closed since delta_v^2 = 0
                if (omega.is_zero()) return std::nullopt;
                Form r = delta_v(edge_homotopy(omega)) - omega;
                return expect_zero(r, omega);
            });

    // --- inverse problem -------------------------------------------------
    bat.run("inverse_variational_round_trip", single_slot(),
            [](Rng&, FormSampler& s, Bidegree) -> std::optional<std::string> {
                ScalarExpr density = s.sample_polynomial();
                SourceForm e = euler_lagrange(LagrangianForm(s.space(), density));
                if (e.is_zero()) return std::nullopt;
                LagrangianForm back = inverse_variational(e);
                SourceForm again = euler_lagrange(back);
                return expect_zero(again.as_form() - e.as_form(), e.as_form());
            });

    bat.run("helmholtz_rejects_non_variational", single_slot(),
            [](Rng&, FormSampler& s, Bidegree) -> std::optional<std::string> {
                // A one-step forward shift as source term is the classic
                // non-variational example.
                const Space& space = s.space();
                MultiIndex step = MultiIndex::unit(static_cast<std::size_t>(space.base_dim), 0);
                std::vector<ScalarExpr> comps(static_cast<std::size_t>(space.fiber_dim()));
                comps[0] = ScalarExpr::fiber(space.fiber_dim() > 1 ? 1 : 0, step);
                SourceForm omega(space, std::move(comps));
                try {
                    inverse_variational(omega);
                } catch (const Error& err) {
                    if (err.code() == ErrorCode::HelmholtzFailed) return std::nullopt;
                    return std::string("unexpected error: ") + err.what();
                }
                return std::string("non-variational source form was accepted");
            });

    // --- standard-class structure -----------------------------------------
    bat.run("structural_identity_random", single_slot(),
            [](Rng& rng, FormSampler& s, Bidegree) -> std::optional<std::string> {
                const Space& space = s.space();
                SamplerOptions pointwise;
                pointwise.stencil_radius = 0;
                FormSampler s0(space, rng, pointwise);
                std::vector<std::vector<ScalarExpr>> L;
                for (int i = 0; i < space.base_dim; ++i) {
                    std::vector<ScalarExpr> row;
                    for (int a = 0; a < space.fiber_dim(); ++a) row.push_back(s0.sample_polynomial());
                    L.push_back(std::move(row));
                }
                DegenerateLagrangian dl(space, std::move(L), s0.sample_polynomial());
                StructuralIdentity id = structural_identity(dl);
                if (!id.residual.is_zero()) return "structural residual " + id.residual.to_string();
                SourceForm direct = el_system(dl);
                SourceForm generic = euler_lagrange(dl.lagrangian());
                return expect_zero(direct.as_form() - generic.as_form(), direct.as_form());
            });

    return bat.results;
}

bool all_passed(const std::vector<CheckOutcome>& outcomes) {
    for (const auto& o : outcomes)
        if (!o.pass) return false;
    return true;
}

}  // namespace dvbx
