#include "horoflow/spherical.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <limits>
#include <stdexcept>
#include <string>

namespace horoflow {

namespace {

void check_args(double theta0, double p, int n)
{
    if (!(theta0 > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
    if (!(p > 0.0)) throw std::invalid_argument("power p must be > 0");
    if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
}

}  // namespace

SphericalState SphericalState::at_tau(double theta0, double p, int n, double tau)
{
    return spherical_solve(theta0, p, n, tau, Clock::Rescaled);
}

double maximal_time(double theta0, double p, int n)
{
    check_args(theta0, p, n);
    const double q0 = sphere_q(theta0);
    // Q = Q0 x^{-1/p} maps (Q0, inf) onto (0, 1] with a bounded integrand
    auto integrand = [&](double x) { return 1.0 / (2.0 * q0 + std::pow(x, 1.0 / p)); };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double integral = ts.integrate(integrand, 0.0, 1.0);
    return std::pow(n, p) * std::pow(q0, 1.0 - p) / p * integral;
}

double elapsed_time(double theta_a, double theta_b, double p, int n)
{
    check_args(theta_a, p, n);
    if (theta_b == theta_a) return 0.0;
    const double np = std::pow(n, p);
    auto integrand = [&](double th) { return np * std::pow(sphere_q(th), -p); };
    // the G7/K15 estimate is far more pessimistic than the K15 error on
    // smooth integrands, so the default sqrt(eps) target already gives K15
    // results accurate to rounding
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, theta_a, theta_b, 15);
}

double advance_radius(double r, double dt, double p, int n)
{
    check_args(r, p, n);
    if (dt < 0.0) throw std::invalid_argument("advance_radius: dt must be >= 0");
    if (dt == 0.0) return r;
    const double rate = std::pow(n, -p);

    // elapsed_time is concave in the end radius, so Newton from the tangent
    // guess approaches the root from below; short steps converge at once
    double th = r + rate * std::pow(sphere_q(r), p) * dt;
    for (int it = 0; it < 12 && std::isfinite(th); ++it) {
        const double step = (dt - elapsed_time(r, th, p, n)) * rate * std::pow(sphere_q(th), p);
        th += step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * th) return th;
    }

    if (dt >= maximal_time(r, p, n)) return std::numeric_limits<double>::infinity();
    double hi = r + rate * std::pow(sphere_q(r), p) * dt;
    for (double grow = hi - r; elapsed_time(r, hi, p, n) < dt; grow *= 2.0) hi += grow;
    auto fn = [&](double x) {
        return std::make_pair(elapsed_time(r, x, p, n) - dt, std::pow(n, p) * std::pow(sphere_q(x), -p));
    };
    std::uintmax_t iters = 60;
    return boost::math::tools::newton_raphson_iterate(fn, 0.5 * (r + hi), r, hi,
                                                      std::numeric_limits<double>::digits - 4, iters);
}

SphericalState spherical_solve(double theta0, double p, int n, double time, Clock clock)
{
    check_args(theta0, p, n);
    if (time < 0.0) throw std::invalid_argument("spherical_solve: time must be >= 0");
    const double rate = std::pow(n, -p);
    SphericalState s;
    s.theta0 = theta0;

    if (clock == Clock::Rescaled) {
        s.tau = time;
        s.theta = theta0 + rate * time;
        s.Q = sphere_q(s.theta);
        s.t = elapsed_time(theta0, s.theta, p, n);
        return s;
    }

    const double t_max = maximal_time(theta0, p, n);
    if (time >= t_max)
        throw std::domain_error("spherical_solve: t = " + std::to_string(time) +
                                " is past the maximal time " + std::to_string(t_max));
    using namespace boost::numeric::odeint;
    double theta = theta0;
    auto rhs = [&](const double& th, double& dth, double) { dth = rate * std::pow(sphere_q(th), p); };
    auto stepper = make_controlled(1e-14, 1e-13, runge_kutta_dopri5<double>());
    if (time > 0.0) integrate_adaptive(stepper, rhs, theta, 0.0, time, std::min(1e-3, time / 16.0));
    s.t = time;
    s.theta = theta;
    s.Q = sphere_q(theta);
    s.tau = (theta - theta0) / rate;
    return s;
}

}  // namespace horoflow
