#include "horoflow/diagnostics.hpp"
#include "horoflow/flow.hpp"
#include "horoflow/graphcurv.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace horoflow;

namespace {

double p_legendre(int k, double x)
{
    double a = 1.0, b = x;
    if (k == 0) return a;
    for (int j = 1; j < k; ++j) {
        const double c = ((2 * j + 1) * x * b - j * a) / (j + 1);
        a = b;
        b = c;
    }
    return b;
}

FlowState state_at(double theta, const std::function<double(double)>& sigma, int n_grid, double p,
                   const char* fn = "shifted-mean")
{
    return FlowState(SphericalState::at_tau(theta, p, 2, 0.0), AxisymProfile::from_function(n_grid, sigma),
                     CurvatureFunction::from_id(fn, 2), p);
}

FlowState perturbed_sphere(double theta0, double eps, int n_grid, double p)
{
    const auto u = AxisymProfile::from_function(n_grid, [&](double phi) { return theta0 + eps * p_legendre(2, std::cos(phi)); });
    return FlowState::from_surface(u, CurvatureFunction::shifted_mean(2), p);
}

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("round spheres are fixed points of the rescaled equation")
{
    for (double p : {0.5, 1.0, 2.0})
        for (const char* id : {"shifted-mean", "gauss-root", "power-mean:r=-1"}) {
            const auto s = state_at(1.3, [](double) { return 0.0; }, 64, p, id);
            CHECK(max_abs(rescaled_rhs(s)) <= 1e-13);
        }
}

TEST_CASE("constant offset moves with the sign of the offset")
{
    // sigma = c is the sphere of radius theta + c: the speed ratio is (Q(theta + c) / Q(theta))^p
    for (double p : {0.5, 1.0})
        for (double c : {-0.2, -0.01, 0.01, 0.2}) {
            const double theta = 2.0;
            const auto s = state_at(theta, [c](double) { return c; }, 64, p);
            const double want = std::pow(2.0, -p) * (std::pow(sphere_q(theta + c) / sphere_q(theta), p) - 1.0);
            for (double x : rescaled_rhs(s)) {
                CHECK(std::abs(x - want) <= 1e-10 * std::abs(want));
                CHECK((x > 0.0) == (c > 0.0));
            }
        }
}

TEST_CASE("finite-difference linearization matches the mode rates")
{
    const double theta = 3.0, eps = 1e-6;
    const int n_grid = 256;
    for (double p : {0.5, 1.0}) {
        for (int k = 0; k <= 4; ++k) {
            auto mode = [k](double phi) { return p_legendre(k, std::cos(phi)); };
            const auto plus = rescaled_rhs(state_at(theta, [&](double phi) { return eps * mode(phi); }, n_grid, p));
            const auto minus = rescaled_rhs(state_at(theta, [&](double phi) { return -eps * mode(phi); }, n_grid, p));
            std::vector<double> lin(plus.size());
            for (size_t j = 0; j < lin.size(); ++j) lin[j] = (plus[j] - minus[j]) / (2.0 * eps);
            const double got = mode_amplitudes(lin, 8)[static_cast<size_t>(k)];
            const double want = linearized_rate(2, p, theta, k);
            CAPTURE(k);
            CAPTURE(p);
            if (k == 1)
                CHECK(std::abs(got) <= 1e-3 * linearized_coefficient(2, p, theta));
            else
                CHECK(std::abs(got / want - 1.0) <= 1e-3);
        }
    }
}

TEST_CASE("sphere stays a sphere for ten thousand steps")
{
    auto s = FlowState::from_surface(AxisymProfile::constant(64, 1.0), CurvatureFunction::shifted_mean(2), 1.0);
    for (int i = 0; i < 10000; ++i) s = step(s, 1e-3);
    CHECK(max_abs(s.sigma.u) <= 1e-9);
    CHECK(s.spherical.tau == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(s.spherical.theta - s.spherical.theta0 - 0.5 * s.spherical.tau) <= 1e-12 * s.spherical.theta);
}

TEST_CASE("theta bookkeeping is exact at every step")
{
    for (Rematch r : {Rematch::Mean, Rematch::None}) {
        auto s = perturbed_sphere(1.5, 0.05, 64, 0.5);
        const double rate = std::pow(2.0, -0.5);
        const double dtau = stable_dtau(s, 0.2);
        for (int i = 0; i < 200; ++i) {
            s = step(s, dtau, r);
            CHECK(std::abs(s.spherical.theta - s.spherical.theta0 - rate * s.spherical.tau) <= 1e-12 * s.spherical.theta);
            CHECK(s.spherical.Q == sphere_q(s.spherical.theta));
        }
    }
}

TEST_CASE("RK4 converges at fourth order in tau")
{
    const auto initial = perturbed_sphere(1.5, 0.08, 32, 1.0);
    const double h = stable_dtau(initial, 1.0);
    const double tau_end = 64 * h;
    auto integrate = [&](int substeps) {
        auto s = initial;
        const int count = 64 * substeps;
        for (int i = 0; i < count; ++i) s = step(s, h / substeps, Rematch::None);
        return s.sigma.u;
    };
    const auto a = integrate(1), b = integrate(2), c = integrate(4);
    std::vector<double> ab(a.size()), bc(a.size());
    for (size_t j = 0; j < a.size(); ++j) {
        ab[j] = a[j] - b[j];
        bc[j] = b[j] - c[j];
    }
    CAPTURE(tau_end);
    const double ratio = max_abs(ab) / max_abs(bc);
    CHECK(max_abs(bc) > 1e-13);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("invariants along a short roundness run")
{
    const auto initial = perturbed_sphere(1.5, 0.05, 64, 1.0);
    const double osc0 = oscillation(initial.surface());
    const double grad0 = gradient_bound_check(initial.surface());

    FlowOptions opt;
    opt.tau_end = 2.0;
    opt.diag_interval = 0.1;
    const RunResult res = run(initial, opt);
    CHECK(res.completed);
    CHECK(res.events.empty());
    CHECK(res.barriers_held());
    CHECK(res.oscillation_bound_held());
    CHECK_FALSE(res.horoconvexity_lost);

    REQUIRE(res.records.size() == 21u);
    CHECK(res.records.front().pinch_ratio > 1.0);
    for (size_t i = 1; i < res.records.size(); ++i) {
        const auto& prev = res.records[i - 1];
        const auto& cur = res.records[i];
        CHECK(cur.pinch_ratio - 1.0 <= 1.05 * (prev.pinch_ratio - 1.0));
        CHECK(cur.osc_u <= osc0 + std::numbers::ln2);
        CHECK(cur.u_min >= cur.barrier_lower - opt.barrier_tol);
        CHECK(cur.u_max <= cur.barrier_upper + opt.barrier_tol);
    }
    for (const auto& r : res.records) {
        CHECK(r.kappaQ_min >= 1.0 - 10.0 * osc0);
        CHECK(r.kappaQ_max <= 1.0 + 10.0 * osc0);
        CHECK(r.pinch_ratio >= 1.0);
    }
    CHECK(res.records.back().pinch_ratio - 1.0 < 0.5 * (res.records.front().pinch_ratio - 1.0));
    CHECK(gradient_bound_check(res.final_state.surface()) <= 3.0 * grad0);
}

TEST_CASE("gradient check stays bounded step by step")
{
    auto s = perturbed_sphere(1.2, 0.06, 64, 0.5);
    const double grad0 = gradient_bound_check(s.surface());
    const double dtau = stable_dtau(s, 0.2);
    for (int i = 0; i < 2000; ++i) {
        s = step(s, dtau);
        if (i % 50 == 0) CHECK(gradient_bound_check(s.surface()) <= 3.0 * grad0);
    }
}

TEST_CASE("diagnostic records are emitted on the configured grid")
{
    const auto initial = perturbed_sphere(1.0, 0.03, 32, 1.0);
    FlowOptions opt;
    opt.tau_end = 0.5;
    opt.diag_interval = 0.25;
    std::vector<double> seen;
    const RunResult res = run(initial, opt, [&](const DiagnosticsRecord& r) { seen.push_back(r.tau); });
    REQUIRE(seen.size() == 3u);
    CHECK(seen[0] == 0.0);
    CHECK(seen[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(seen[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.records.back().mode_amps.size() == 9u);
}

TEST_CASE("large power records convexity loss instead of stopping")
{
    // a deep mode-2 neck, horo-convex initially, with p = 2 outside the preservation regime
    const auto u = AxisymProfile::from_function(64, [](double phi) {
        return 0.6 - 0.1 * p_legendre(2, std::cos(phi));
    });
    const auto initial = FlowState::from_surface(u, CurvatureFunction::shifted_mean(2), 2.0);
    FlowOptions opt;
    opt.tau_end = 0.5;
    opt.track_center = false;
    const RunResult res = run(initial, opt);
    CHECK_FALSE(res.stopped_on_guard);
    CHECK((res.completed || res.horoconvexity_lost || !res.events.empty()));
    if (res.horoconvexity_lost) CHECK(res.has_event("HoroConvexityLost"));

    // the automatic guard ignores the band above p = 1 and enforces it at p = 1
    opt.tau_end = 0.2;
    opt.guard_band = 2.0;
    const RunResult relaxed = run(perturbed_sphere(1.0, 0.05, 32, 2.0), opt);
    CHECK_FALSE(relaxed.stopped_on_guard);
    CHECK(relaxed.completed);
    const RunResult enforced = run(perturbed_sphere(1.0, 0.05, 32, 1.0), opt);
    CHECK(enforced.stopped_on_guard);
}

TEST_CASE("strict guard stops on the guard band")
{
    const auto initial = perturbed_sphere(1.0, 0.05, 32, 1.0);
    FlowOptions opt;
    opt.tau_end = 0.2;
    opt.guard = ConvexityGuard::Strict;
    opt.guard_band = 2.0;  // above the sphere's kappa Q = 1
    const RunResult res = run(initial, opt);
    CHECK(res.stopped_on_guard);
    CHECK(res.has_event("HoroConvexityLost"));
    CHECK_FALSE(res.completed);
}

TEST_CASE("invalid initial data is rejected")
{
    const auto fn = CurvatureFunction::shifted_mean(2);
    FlowOptions opt;
    opt.tau_end = 0.1;
    const auto wavy = AxisymProfile::from_function(64, [](double phi) { return 0.5 + 0.3 * std::cos(4 * phi); });
    CHECK_THROWS_AS((void)run(FlowState::from_surface(wavy, fn, 1.0), opt), std::invalid_argument);
    const auto negative = AxisymProfile::constant(64, -1.0);
    CHECK_THROWS_AS((void)FlowState::from_surface(negative, fn, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)FlowState::from_surface(AxisymProfile::constant(64, 1.0), fn, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)FlowState::from_surface(AxisymProfile::constant(64, 1.0), CurvatureFunction::shifted_mean(3), 1.0),
                    std::invalid_argument);
    opt.cfl = 0.0;
    CHECK_THROWS_AS((void)run(FlowState::from_surface(AxisymProfile::constant(64, 1.0), fn, 1.0), opt),
                    std::invalid_argument);
}
