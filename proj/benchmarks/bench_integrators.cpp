#include <benchmark/benchmark.h>

#include "dvbx/integrators.hpp"
#include "dvbx/parser.hpp"
#include "dvbx/scheme.hpp"

using namespace dvbx;

static void BM_euler_b_step(benchmark::State& state) {
    EulerBIntegrator integ(
        parse_expr("0.05*(q^2*p + p^3/3 + q^2 + p^2)", EulerBIntegrator::mechanics_space()));
    EulerBIntegrator::State s{0.7, 0.2};
    long n = 0;
    for (auto _ : state) {
        auto r = integ.step(s, n++);
        benchmark::DoNotOptimize(r);
        s = r.next;
    }
}
BENCHMARK(BM_euler_b_step);

static void BM_wave_sweep(benchmark::State& state) {
    Space space{2, {"u", "v", "w", "p"}};
    StencilScheme scheme = make_wave_scheme(parse_expr("1 - cos(u)", space), -1.0);
    auto nt = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        SchemeRun run(scheme, Mesh::uniform(64, nt, 0.1, 0.04), BoundaryCondition::Periodic,
                      {{"u", "sin(2*pi*x/L)"}, {"v", "0"}});
        run.advance();
        benchmark::DoNotOptimize(run.base());
    }
}
BENCHMARK(BM_wave_sweep)->Arg(16)->Arg(64);

static void BM_tangent_propagation(benchmark::State& state) {
    Space space{2, {"u", "v", "w", "p"}};
    StencilScheme scheme = make_wave_scheme(parse_expr("1 - cos(u)", space), -1.0);
    SchemeRun run(scheme, Mesh::uniform(64, 64, 0.1, 0.04), BoundaryCondition::Periodic,
                  {{"u", "sin(2*pi*x/L)"}, {"v", "0"}});
    run.advance();
    for (auto _ : state) benchmark::DoNotOptimize(run.propagate_tangent(11));
}
BENCHMARK(BM_tangent_propagation);
