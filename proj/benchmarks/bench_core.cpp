#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "capdrop/equilibrium.hpp"
#include "capdrop/moving_frame.hpp"
#include "capdrop/relax.hpp"
#include "capdrop/spectral.hpp"

using namespace capdrop;

namespace {

PhysicalParams g1() {
    PhysicalParams p;
    p.g = 1.0;
    p.gamma_jump = -0.3;
    p.volume = std::numbers::pi;
    return p;
}

SurfaceProfile wobbly(int n) {
    const auto g = g1().grid(n);
    return SurfaceProfile(g, sample(g, [](double t) { return 1.0 + 0.2 * std::sin(t) + 0.03 * std::cos(3 * t); }));
}

}  // namespace

static void BM_EnergyValue(benchmark::State& st) {
    const auto p = wobbly(static_cast<int>(st.range(0)));
    const DiscreteEnergy e(p.grid, g1(), 1e-4);
    for (auto _ : st) benchmark::DoNotOptimize(e.value(p.rho));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_EnergyValue)->RangeMultiplier(2)->Range(200, 1600)->Complexity(benchmark::oN);

static void BM_EnergyGradient(benchmark::State& st) {
    const auto p = wobbly(static_cast<int>(st.range(0)));
    const DiscreteEnergy e(p.grid, g1(), 1e-4);
    Field grad;
    for (auto _ : st) {
        e.gradient(p.rho, grad);
        benchmark::DoNotOptimize(grad.data());
    }
}
BENCHMARK(BM_EnergyGradient)->RangeMultiplier(2)->Range(200, 1600);

static void BM_MinimizeEps(benchmark::State& st) {
    const auto par = g1();
    const auto start = shoot_symmetric(par, static_cast<int>(st.range(0)));
    // start slightly off the equilibrium so that the Newton polish has work to do
    Field r = start.profile.rho;
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += 1e-3 * std::cos(2 * start.profile.grid.nodes[j]);
    const SurfaceProfile init(start.profile.grid, r);
    for (auto _ : st) benchmark::DoNotOptimize(minimize_eps(par, 1e-6, init).multiplier);
}
BENCHMARK(BM_MinimizeEps)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Shooting(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(shoot_symmetric(g1(), static_cast<int>(st.range(0))).multiplier);
}
BENCHMARK(BM_Shooting)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_SigmaFormEigen(benchmark::State& st) {
    const auto par = g1();
    const auto sol = shoot_symmetric(par, static_cast<int>(st.range(0)));
    for (auto _ : st) {
        const auto d = constrained_eigen(sigma_form(sol.profile, par), Subspace::doubly_constrained);
        benchmark::DoNotOptimize(d.eigenvalues[0]);
    }
}
BENCHMARK(BM_SigmaFormEigen)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Recentre(benchmark::State& st) {
    const auto sol = shoot_symmetric(g1(), 400);
    auto curve = to_cartesian(sol.profile);
    for (auto& pt : curve.points) pt.first += 0.05;
    for (auto _ : st) benchmark::DoNotOptimize(recentre(curve, sol.profile).pole_x);
}
BENCHMARK(BM_Recentre)->Unit(benchmark::kMillisecond);

static void BM_RelaxStep(benchmark::State& st) {
    const auto par = g1();
    auto p = wobbly(static_cast<int>(st.range(0)));
    rescale_to_volume(p.rho, p.grid, par.volume);
    for (auto _ : st) {
        double dt = 1e-7;
        benchmark::DoNotOptimize(step(p, par, dt).rho.data());
    }
}
BENCHMARK(BM_RelaxStep)->Arg(400)->Arg(800);

BENCHMARK_MAIN();
