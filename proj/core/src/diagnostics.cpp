#include "horoflow/diagnostics.hpp"

#include "horoflow/graphcurv.hpp"
#include "horoflow/hypgeom.hpp"

#include <cmath>
// the pchip header of some Boost releases calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace horoflow {

double pinch_ratio(const AxisymProfile& p)
{
    const AxisymCurvatures c = axisym_curvatures(p);
    double worst = 1.0;
    for (size_t j = 0; j < c.kappa_meridian.size(); ++j) {
        const auto [lo, hi] = std::minmax(c.kappa_meridian[j], c.kappa_parallel[j]);
        if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, hi / lo);
    }
    return worst;
}

RescaledRange rescaled_curvature_range(const AxisymProfile& p, double Q, const CurvatureFunction& fn)
{
    if (fn.dim() != 2) throw std::invalid_argument("rescaled_curvature_range: n must be 2");
    const AxisymCurvatures c = axisym_curvatures(p);
    RescaledRange r;
    r.kappaQ_min = r.FQ_min = std::numeric_limits<double>::infinity();
    r.kappaQ_max = r.FQ_max = -std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < c.kappa_meridian.size(); ++j) {
        const double km = c.kappa_meridian[j] * Q, kp = c.kappa_parallel[j] * Q;
        const double fq = fn.eval(CurvaturePoint{km, kp});
        r.kappaQ_min = std::min({r.kappaQ_min, km, kp});
        r.kappaQ_max = std::max({r.kappaQ_max, km, kp});
        r.FQ_min = std::min(r.FQ_min, fq);
        r.FQ_max = std::max(r.FQ_max, fq);
    }
    return r;
}

std::vector<double> mode_amplitudes(std::span<const double> sigma, int max_degree)
{
    const int n = static_cast<int>(sigma.size());
    if (max_degree < 0 || 4 * max_degree > n)
        throw std::invalid_argument("mode_amplitudes: need 0 <= K <= n_grid/4 (K = " +
                                    std::to_string(max_degree) + ", n_grid = " + std::to_string(n) + ")");
    const std::vector<double> w = fejer_weights(n);
    std::vector<double> a(static_cast<size_t>(max_degree) + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        const double x = std::cos(cell_angle(j, n));
        const double ws = w[static_cast<size_t>(j)] * sigma[static_cast<size_t>(j)];
        for (int k = 0; k <= max_degree; ++k) a[static_cast<size_t>(k)] += ws * std::legendre(k, x);
    }
    for (int k = 0; k <= max_degree; ++k) a[static_cast<size_t>(k)] *= 0.5 * (2 * k + 1);
    return a;
}

std::vector<double> mode_synthesis(std::span<const double> amps, int n_grid)
{
    std::vector<double> out(static_cast<size_t>(n_grid), 0.0);
    for (int j = 0; j < n_grid; ++j) {
        const double x = std::cos(cell_angle(j, n_grid));
        for (size_t k = 0; k < amps.size(); ++k)
            out[static_cast<size_t>(j)] += amps[k] * std::legendre(static_cast<unsigned>(k), x);
    }
    return out;
}

double linearized_coefficient(int n, double p, double theta)
{
    if (!(theta > 0.0)) throw std::invalid_argument("linearized_coefficient: theta must be > 0");
    return asymptotic_coefficient(n, p) / -std::expm1(-2.0 * theta);
}

double asymptotic_coefficient(int n, double p) { return 2.0 * p / std::pow(n, p + 1.0); }

double linearized_rate(int n, double p, double theta, int k)
{
    return linearized_coefficient(n, p, theta) * (n - k * (n - 1 + k));
}

double bulk_decay_rate(int n, double p, double theta)
{
    return 2.0 * (n + 2) * linearized_coefficient(n, p, theta);
}

namespace {

struct Transformed {
    std::vector<double> angle;  // includes both poles
    std::vector<double> radius;
    bool star_shaped = true;
};

// Polar coordinates of the profile's meridian about the axis point d.
Transformed transform_meridian(const AxisymProfile& p, double d)
{
    const auto [north, south] = pole_values(p.u);
    const double cd = std::cosh(d), sd = std::sinh(d);
    Transformed t;
    t.angle.reserve(p.u.size() + 2);
    t.radius.reserve(p.u.size() + 2);
    t.angle.push_back(0.0);
    t.radius.push_back(north - d);
    for (int j = 0; j < p.n_grid(); ++j) {
        const double u = p.u[static_cast<size_t>(j)], ph = p.phi(j);
        const double x = std::sinh(u) * std::sin(ph);
        const double z = cd * std::sinh(u) * std::cos(ph) - sd * std::cosh(u);
        t.angle.push_back(std::atan2(x, z));
        t.radius.push_back(std::asinh(std::hypot(x, z)));
    }
    t.angle.push_back(std::numbers::pi);
    t.radius.push_back(south + d);
    if (t.radius.front() <= 0.0 || t.radius.back() <= 0.0) t.star_shaped = false;
    for (size_t k = 1; k < t.angle.size(); ++k)
        if (!(t.angle[k] > t.angle[k - 1])) t.star_shaped = false;
    return t;
}

}  // namespace

double recentred_oscillation(const AxisymProfile& p, double d)
{
    const Transformed t = transform_meridian(p, d);
    if (!t.star_shaped) return std::numeric_limits<double>::infinity();
    const auto [lo, hi] = std::minmax_element(t.radius.begin(), t.radius.end());
    return *hi - *lo;
}

AxisymProfile recentre(const AxisymProfile& p, double d)
{
    p.validate();
    Transformed t = transform_meridian(p, d);
    if (!t.star_shaped)
        throw std::domain_error("surface is not star-shaped about the axis point d = " + std::to_string(d));
    const int n = p.n_grid();
    boost::math::interpolators::pchip<std::vector<double>> interp(std::move(t.angle), std::move(t.radius));
    AxisymProfile out;
    out.t = p.t;
    out.tau = p.tau;
    out.u.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) out.u[static_cast<size_t>(j)] = interp(cell_angle(j, n));
    return out;
}

CenterSearch optimal_center(const AxisymProfile& p, double tol)
{
    p.validate();
    const double span = std::max(oscillation(p), tol);
    auto f = [&](double d) { return recentred_oscillation(p, d); };
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = -span, b = span;
    double c = b - ratio * (b - a), e = a + ratio * (b - a);
    double fc = f(c), fe = f(e);
    while (b - a > tol) {
        if (fc <= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + ratio * (b - a);
            fe = f(e);
        }
    }
    CenterSearch out;
    out.offset = 0.5 * (a + b);
    out.oscillation = f(out.offset);
    out.recentred = recentre(p, out.offset);
    return out;
}

double hausdorff_roundness(const AxisymProfile& p, int azimuths)
{
    return fit_sphere(surface_points(p, azimuths)).hausdorff;
}

DecayFit fit_decay(std::span<const std::pair<double, double>> series, double window)
{
    if (series.size() < 2) throw std::invalid_argument("fit_decay: need at least two samples");
    if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("fit_decay: window must lie in (0, 1]");
    const double t0 = series.front().first, t1 = series.back().first;
    const double start = t1 - window * (t1 - t0);
    std::vector<double> xs, ys;
    for (const auto& [tau, value] : series) {
        if (tau < start) continue;
        if (!(value > 0.0))
            throw std::invalid_argument("fit_decay: nonpositive value " + std::to_string(value) +
                                        " at tau = " + std::to_string(tau));
        xs.push_back(tau);
        ys.push_back(std::log(value));
    }
    const auto m = static_cast<double>(xs.size());
    if (xs.size() < 2) throw std::invalid_argument("fit_decay: fewer than two samples in the window");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / m;
        my += ys[i] / m;
    }
    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        cxx += (xs[i] - mx) * (xs[i] - mx);
        cxy += (xs[i] - mx) * (ys[i] - my);
        cyy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(cxx > 0.0)) throw std::invalid_argument("fit_decay: window has no tau spread");
    DecayFit fit;
    fit.points = static_cast<int>(xs.size());
    const double slope = cxy / cxx;
    fit.exponent = -slope;
    fit.log_prefactor = my - slope * mx;
    fit.r_squared = cyy > 0.0 ? std::clamp(cxy * cxy / (cxx * cyy), 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace horoflow
