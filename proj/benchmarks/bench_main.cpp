#include "horoflow/curvfun.hpp"
#include "horoflow/flow.hpp"
#include "horoflow/graphcurv.hpp"
#include "horoflow/hypgeom.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace horoflow;

namespace {

FlowState bumpy_state(int n_grid)
{
    const auto u = AxisymProfile::from_function(n_grid, [](double phi) {
        const double x = std::cos(phi);
        return 1.5 + 0.05 * (1.5 * x * x - 0.5);
    });
    return FlowState::from_surface(u, CurvatureFunction::shifted_mean(2), 1.0);
}

void rescaled_rhs_bench(benchmark::State& state)
{
    const auto s = bumpy_state(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rescaled_rhs(s));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(rescaled_rhs_bench)->RangeMultiplier(2)->Range(64, 1024);

void rk4_step_bench(benchmark::State& state)
{
    const auto s = bumpy_state(static_cast<int>(state.range(0)));
    const double dtau = stable_dtau(s, 0.2);
    for (auto _ : state) benchmark::DoNotOptimize(step(s, dtau));
}
BENCHMARK(rk4_step_bench)->RangeMultiplier(2)->Range(64, 1024);

void curvature_derivatives_bench(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto fn = CurvatureFunction::gauss_root(n);
    CurvaturePoint k;
    k.kappa = Eigen::VectorXd::LinSpaced(n, 0.5, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(fn.derivatives(k));
}
BENCHMARK(curvature_derivatives_bench)->DenseRange(2, 6);

void sphere_fit_bench(benchmark::State& state)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
    std::vector<HyperboloidPoint> pts;
    for (int i = 0; i < state.range(0); ++i) {
        const double phi = 0.5 * angle(rng), eta = angle(rng);
        const Eigen::Vector3d dir(std::sin(phi) * std::cos(eta), std::sin(phi) * std::sin(eta), std::cos(phi));
        pts.push_back(polar_to_hyperboloid(PolarPoint{1.3, dir}));
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_sphere(pts));
}
BENCHMARK(sphere_fit_bench)->Arg(256)->Arg(4096);

}  // namespace
BENCHMARK_MAIN();
