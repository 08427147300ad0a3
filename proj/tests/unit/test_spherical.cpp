#include "horoflow/spherical.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace horoflow;

namespace {

// p = 1: Q / (2Q + 1) = Q0 / (2Q0 + 1) * e^{t/n} from separating dQ/dt = Q (2Q + 1) / n
double closed_form_q(double q0, int n, double t)
{
    const double ratio = q0 / (2.0 * q0 + 1.0) * std::exp(t / n);
    return ratio / (1.0 - 2.0 * ratio);
}

double closed_form_tstar(double q0, int n) { return n * std::log((2.0 * q0 + 1.0) / (2.0 * q0)); }

double theta_for_q(double q) { return 0.5 * std::log1p(2.0 * q); }

}  // namespace

TEST_CASE("sphere_q")
{
    CHECK(sphere_q(0.0) == 0.0);
    CHECK(sphere_q(0.5 * std::log(3.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sphere_q(1e-9) == doctest::Approx(1e-9).epsilon(1e-8));
}

TEST_CASE("maximal time against the p = 1 closed form")
{
    const double theta_unit_q = theta_for_q(1.0);
    CHECK(oracle::rel_err(maximal_time(theta_unit_q, 1.0, 2), 2.0 * std::log(1.5)) <= 1e-8);
    for (int n : {2, 3, 4})
        for (double q0 : {0.1, 1.0, 30.0})
            CHECK(std::abs(maximal_time(theta_for_q(q0), 1.0, n) / closed_form_tstar(q0, n) - 1.0) <= 1e-8);
}

TEST_CASE("spherical ODE follows the closed-form trajectory")
{
    for (int n : {2, 3}) {
        const double theta0 = 1.0;
        const double q0 = sphere_q(theta0);
        const double tstar = closed_form_tstar(q0, n);
        for (double frac : {0.1, 0.5, 0.9, 0.99}) {
            const double t = frac * tstar;
            const auto st = spherical_solve(theta0, 1.0, n, t);
            const double want = closed_form_q(q0, n, t);
            CHECK(std::abs(st.Q / want - 1.0) <= 1e-8);
            CHECK(st.Q == doctest::Approx(sphere_q(st.theta)).epsilon(1e-12));
            CHECK(st.t == t);
        }
    }
}

TEST_CASE("rescaled clock advances theta at rate n^{-p}")
{
    for (double p : {0.5, 1.0, 2.0})
        for (int n : {2, 3}) {
            const double theta0 = 0.8;
            for (double tau : {0.0, 0.3, 2.0, 10.0}) {
                const auto st = spherical_solve(theta0, p, n, tau, Clock::Rescaled);
                CHECK(std::abs(st.theta - theta0 - std::pow(n, -p) * tau) <= 1e-12 * std::max(1.0, st.theta));
                CHECK(st.tau == tau);
                const auto at = SphericalState::at_tau(theta0, p, n, tau);
                CHECK(at.theta == st.theta);
                CHECK(at.theta0 == theta0);
                // original time stays below T* and matches the elapsed time of the radius change
                CHECK(st.t < maximal_time(theta0, p, n));
                CHECK(st.t == doctest::Approx(elapsed_time(theta0, st.theta, p, n)).epsilon(1e-10));
            }
        }
    const auto zero = spherical_solve(1.3, 1.0, 2, 0.0);
    CHECK(zero.Q == sphere_q(1.3));
    CHECK(zero.theta == 1.3);
}

TEST_CASE("both clocks describe the same sphere")
{
    const double theta0 = 0.6, p = 0.5;
    const int n = 2;
    const auto resc = spherical_solve(theta0, p, n, 3.0, Clock::Rescaled);
    const auto orig = spherical_solve(theta0, p, n, resc.t, Clock::Original);
    CHECK(orig.theta == doctest::Approx(resc.theta).epsilon(1e-8));
    CHECK(orig.tau == doctest::Approx(resc.tau).epsilon(1e-7));
}

TEST_CASE("maximal time is monotone")
{
    for (double p : {0.5, 1.0, 2.0}) {
        const double a = maximal_time(0.5, p, 2), b = maximal_time(1.0, p, 2), c = maximal_time(2.0, p, 2);
        CHECK(a > b);
        CHECK(b > c);
        CHECK(std::isfinite(a));
    }
    for (double p : {1.0, 2.0}) CHECK(maximal_time(0.01, p, 2) > maximal_time(0.1, p, 2));
}

TEST_CASE("radius advance and elapsed time are inverse")
{
    for (double p : {0.5, 1.0, 3.0}) {
        const double r = 0.7;
        const double t_ab = elapsed_time(r, 1.9, p, 2);
        CHECK(advance_radius(r, t_ab, p, 2) == doctest::Approx(1.9).epsilon(1e-9));
        CHECK(elapsed_time(r, r, p, 2) == 0.0);
        CHECK(std::isinf(advance_radius(r, maximal_time(r, p, 2) * 1.01, p, 2)));
    }
}

TEST_CASE("times past blow-up are rejected")
{
    const double tstar = maximal_time(1.0, 1.0, 2);
    CHECK_THROWS_AS((void)spherical_solve(1.0, 1.0, 2, tstar), std::domain_error);
    CHECK_THROWS_AS((void)spherical_solve(1.0, 1.0, 2, 2.0 * tstar), std::domain_error);
    CHECK_THROWS((void)maximal_time(1.0, 0.0, 2));
    CHECK_THROWS((void)spherical_solve(-1.0, 1.0, 2, 0.1));
}
