#include <benchmark/benchmark.h>

#include "dvbx/homotopy.hpp"
#include "dvbx/operators.hpp"
#include "dvbx/random_forms.hpp"
#include "dvbx/variational.hpp"

using namespace dvbx;

namespace {

Form sample(int p, int q, Bidegree b, std::uint64_t seed) {
    Rng rng(seed);
    Space space{p, std::vector<std::string>(q == 1 ? std::vector<std::string>{"u"}
                                                   : std::vector<std::string>{"u", "v"})};
    FormSampler sampler(space, rng);
    return sampler.sample_form(b);
}

}  // namespace

static void BM_wedge(benchmark::State& state) {
    Form a = sample(3, 2, {1, 1}, 1);
    Form b = sample(3, 2, {1, 1}, 2);
    for (auto _ : state) benchmark::DoNotOptimize(wedge(a, b));
}
BENCHMARK(BM_wedge);

static void BM_d_h(benchmark::State& state) {
    Form a = sample(3, 2, {1, 2}, 3);
    for (auto _ : state) benchmark::DoNotOptimize(d_h(a));
}
BENCHMARK(BM_d_h);

static void BM_d_v(benchmark::State& state) {
    Form a = sample(3, 2, {2, 1}, 4);
    for (auto _ : state) benchmark::DoNotOptimize(d_v(a));
}
BENCHMARK(BM_d_v);

static void BM_euler_lagrange(benchmark::State& state) {
    Rng rng(5);
    Space space{2, {"u"}};
    FormSampler sampler(space, rng);
    ScalarExpr density = sampler.sample_polynomial();
    LagrangianForm L(space, density);
    for (auto _ : state) benchmark::DoNotOptimize(euler_lagrange(L));
}
BENCHMARK(BM_euler_lagrange);

static void BM_interior_euler(benchmark::State& state) {
    Form a = sample(2, 1, {2, 1}, 6);
    for (auto _ : state) benchmark::DoNotOptimize(interior_euler(a));
}
BENCHMARK(BM_interior_euler);

static void BM_h_horizontal(benchmark::State& state) {
    Form a = sample(2, 1, {1, 1}, 7);
    for (auto _ : state) benchmark::DoNotOptimize(h_horizontal(a));
}
BENCHMARK(BM_h_horizontal);
