#include "horoflow/flow.hpp"

#include "horoflow/diagnostics.hpp"
#include "horoflow/graphcurv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace horoflow {

HoroConvexityLost::HoroConvexityLost(int c, double t, double k)
    : std::runtime_error("horo-convexity lost at cell " + std::to_string(c) + " (tau = " + std::to_string(t) +
                         ", kappa = " + std::to_string(k) + ")"),
      cell(c), tau(t), kappa(k)
{
}

FlowState::FlowState(SphericalState sph, AxisymProfile sig, CurvatureFunction f, double power)
    : spherical(sph), sigma(std::move(sig)), fn(std::move(f)), p(power)
{
    if (!(p > 0.0)) throw std::invalid_argument("flow power p must be > 0");
    if (fn.dim() != 2) throw std::invalid_argument("axisymmetric flow needs a curvature function with n = 2");
}

FlowState FlowState::from_surface(const AxisymProfile& u, const CurvatureFunction& fn, double p)
{
    u.validate();
    const double mean = mode_amplitudes(u.u, 0)[0];
    if (!(mean > 0.0)) throw std::invalid_argument("mean radius of the initial surface must be > 0");
    AxisymProfile sigma(u.u);
    for (double& x : sigma.u) x -= mean;
    SphericalState sph;
    sph.theta0 = sph.theta = mean;
    sph.Q = sphere_q(mean);
    return FlowState(sph, std::move(sigma), fn, p);
}

AxisymProfile FlowState::surface() const
{
    AxisymProfile u(sigma.u);
    for (double& x : u.u) x += spherical.theta;
    u.t = spherical.t;
    u.tau = spherical.tau;
    return u;
}

bool RunResult::has_event(const std::string& kind) const
{
    return std::any_of(events.begin(), events.end(), [&](const FlowEvent& e) { return e.kind == kind; });
}

namespace {

const std::vector<double>& cached_weights(int n)
{
    thread_local std::vector<double> w;
    thread_local int cached = -1;
    if (cached != n) {
        w = fejer_weights(n);
        cached = n;
    }
    return w;
}

double mean_of(const std::vector<double>& x)
{
    const auto& w = cached_weights(static_cast<int>(x.size()));
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
    return 0.5 * s;
}

// Normal speeds v / F(kappa Q)^p at every cell of u = sigma + theta.
void cell_speeds(const std::vector<double>& sigma, double theta, double tau, const CurvatureFunction& fn,
                 double p, bool allow_off_cone, std::vector<double>& out, StepProbe* pr)
{
    const int n = static_cast<int>(sigma.size());
    const double Q = sphere_q(theta);
    std::vector<double> d1(sigma.size()), d2(sigma.size());
    axisym_derivatives(sigma, d1, d2);
    out.resize(sigma.size());
    const bool off_ok = allow_off_cone && fn.extends_off_cone();
    for (int j = 0; j < n; ++j) {
        const auto k = static_cast<size_t>(j);
        const double u = sigma[k] + theta;
        if (!(u > 0.0)) throw std::domain_error("radial graph reached the origin at cell " + std::to_string(j));
        const double ph = cell_angle(j, n);
        const CellCurvature c = axisym_cell(u, d1[k], d2[k], std::cos(ph) / std::sin(ph));
        const double km = c.meridian * Q, kp = c.parallel * Q;
        const double kq = std::min(km, kp);
        if (pr && kq < pr->min_kappaQ) {
            pr->min_kappaQ = kq;
            pr->min_cell = j;
        }
        if (!(kq > 0.0) && !off_ok) throw HoroConvexityLost(j, tau, kq / Q);
        const CurvaturePoint at{km, kp};
        const double F = fn.eval(at);
        if (!(F > 0.0))
            throw std::domain_error("speed undefined: F(kappa Q) = " + std::to_string(F) + " at cell " +
                                    std::to_string(j));
        out[k] = c.v / std::pow(F, p);
        if (pr) {
            const DerivativeBundle d = fn.derivatives(at);
            const double sh = std::sinh(u);
            const double diff = p * std::pow(F, -p - 1.0) * Q / (c.v * c.v * sh * sh) * d.grad.sum();
            pr->max_diffusivity = std::max(pr->max_diffusivity, diff);
        }
    }
}

}  // namespace

std::vector<double> rescaled_rhs(const FlowState& s, bool allow_off_cone)
{
    std::vector<double> out;
    cell_speeds(s.sigma.u, s.spherical.theta, s.spherical.tau, s.fn, s.p, allow_off_cone, out, nullptr);
    const double rate = std::pow(s.n(), -s.p);
    for (double& x : out) x -= rate;
    return out;
}

StepProbe probe(const FlowState& s, bool allow_off_cone)
{
    StepProbe pr;
    std::vector<double> out;
    cell_speeds(s.sigma.u, s.spherical.theta, s.spherical.tau, s.fn, s.p, allow_off_cone, out, &pr);
    return pr;
}

double stable_dtau(const FlowState& s, double cfl)
{
    const double h = s.sigma.spacing();
    return cfl * h * h / probe(s, true).max_diffusivity;
}

FlowState step(const FlowState& s, double dtau, Rematch rematch, bool allow_off_cone)
{
    const double rate = std::pow(s.n(), -s.p);
    const double anchor = s.spherical.theta0;
    const double tau0 = s.spherical.tau;
    const size_t m = s.sigma.u.size();

    // state (sigma, delta, t) with theta = anchor + delta + rate * tau
    auto deriv = [&](const std::vector<double>& sig, double delta, double tau, std::vector<double>& dsig,
                     double& ddelta, double& dt) {
        const double theta = anchor + delta + rate * tau;
        cell_speeds(sig, theta, tau, s.fn, s.p, allow_off_cone, dsig, nullptr);
        const double shift = rematch == Rematch::Mean ? mean_of(dsig) : rate;
        for (double& x : dsig) x -= shift;
        ddelta = shift - rate;
        dt = std::pow(sphere_q(theta), -s.p);
    };

    std::vector<double> k1, k2, k3, k4, tmp(m);
    double e1, e2, e3, e4, t1, t2, t3, t4;
    const auto& y = s.sigma.u;
    deriv(y, 0.0, tau0, k1, e1, t1);
    for (size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * dtau * k1[j];
    deriv(tmp, 0.5 * dtau * e1, tau0 + 0.5 * dtau, k2, e2, t2);
    for (size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * dtau * k2[j];
    deriv(tmp, 0.5 * dtau * e2, tau0 + 0.5 * dtau, k3, e3, t3);
    for (size_t j = 0; j < m; ++j) tmp[j] = y[j] + dtau * k3[j];
    deriv(tmp, dtau * e3, tau0 + dtau, k4, e4, t4);

    FlowState out = s;
    for (size_t j = 0; j < m; ++j) out.sigma.u[j] = y[j] + dtau / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    const double delta = dtau / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
    SphericalState& sph = out.spherical;
    sph.theta0 = anchor + delta;
    sph.tau = tau0 + dtau;
    sph.theta = sph.theta0 + rate * sph.tau;
    sph.Q = sphere_q(sph.theta);
    sph.t = s.spherical.t + dtau / 6.0 * (t1 + 2.0 * t2 + 2.0 * t3 + t4);
    out.sigma.tau = sph.tau;
    out.sigma.t = sph.t;
    return out;
}

namespace {

std::pair<double, double> extremes(const AxisymProfile& u)
{
    const auto [lo, hi] = std::minmax_element(u.u.begin(), u.u.end());
    const auto [north, south] = pole_values(u.u);
    return {std::min({*lo, north, south}), std::max({*hi, north, south})};
}

void log_event(std::vector<FlowEvent>& events, FlowEvent e)
{
    for (auto& old : events)
        if (old.kind == e.kind) {
            ++old.count;
            return;
        }
    events.push_back(std::move(e));
}

}  // namespace

DiagnosticsRecord diagnose(const FlowState& s, const FlowOptions& opt)
{
    const AxisymProfile u = s.surface();
    DiagnosticsRecord r;
    r.tau = s.spherical.tau;
    r.t = s.spherical.t;
    r.theta = s.spherical.theta;
    r.anchor = s.spherical.theta0;
    r.osc_u = oscillation(u);
    std::tie(r.u_min, r.u_max) = extremes(u);
    r.pinch_ratio = pinch_ratio(u);
    try {
        const RescaledRange rr = rescaled_curvature_range(u, s.spherical.Q, s.fn);
        r.kappaQ_min = rr.kappaQ_min;
        r.kappaQ_max = rr.kappaQ_max;
        r.FQ_min = rr.FQ_min;
        r.FQ_max = rr.FQ_max;
    } catch (const std::domain_error&) {
        r.kappaQ_min = r.kappaQ_max = r.FQ_min = r.FQ_max = std::nan("");
    }
    const AxisymCurvatures c = axisym_curvatures(u);
    for (double v : c.v) r.v_minus_1_max = std::max(r.v_minus_1_max, v - 1.0);
    for (double x : s.sigma.u) r.max_abs_sigma = std::max(r.max_abs_sigma, std::abs(x));
    r.mode_amps = mode_amplitudes(s.sigma.u, std::min(opt.modes, s.sigma.n_grid() / 4));
    r.hausdorff = hausdorff_roundness(u, opt.hausdorff_azimuths);
    if (opt.track_center) {
        try {
            const CenterSearch cs = optimal_center(u);
            r.center_offset = cs.offset;
            r.osc_centered = cs.oscillation;
        } catch (const std::domain_error&) {
            r.center_offset = r.osc_centered = std::nan("");
        }
    } else {
        r.osc_centered = r.osc_u;
    }
    return r;
}

RunResult run(const FlowState& initial, const FlowOptions& opt,
              const std::function<void(const DiagnosticsRecord&)>& on_record)
{
    if (!(opt.tau_end >= 0.0)) throw std::invalid_argument("tau_end must be >= 0");
    if (!(opt.cfl > 0.0)) throw std::invalid_argument("cfl must be > 0");
    if (!(opt.diag_interval > 0.0)) throw std::invalid_argument("diag_interval must be > 0");

    const AxisymProfile u0 = initial.surface();
    u0.validate();
    {
        const AxisymCurvatures c = axisym_curvatures(u0);
        for (int j = 0; j < u0.n_grid(); ++j) {
            const auto k = static_cast<size_t>(j);
            if (!(c.kappa_meridian[k] > 0.0 && c.kappa_parallel[k] > 0.0))
                throw std::invalid_argument("initial surface is not horo-convex at cell " + std::to_string(j));
        }
    }

    const bool strict = opt.guard == ConvexityGuard::Strict ||
                        (opt.guard == ConvexityGuard::Auto && initial.p <= 1.0);
    const int n = initial.n();
    const double p = initial.p;

    RunResult res(initial);
    res.barrier_tol = opt.barrier_tol;
    res.initial_osc = oscillation(u0);
    const auto [lower0, upper0] = extremes(u0);
    double lower = lower0, upper = upper0;
    const double upper_blowup = maximal_time(upper0, p, n);

    auto emit = [&](const FlowState& s) {
        DiagnosticsRecord r = diagnose(s, opt);
        r.barrier_lower = lower;
        r.barrier_upper = upper;
        if (on_record) on_record(r);
        res.records.push_back(std::move(r));
    };

    FlowState state = initial;
    emit(state);
    for (double x : state.sigma.u) res.max_abs_sigma = std::max(res.max_abs_sigma, std::abs(x));
    double next_diag = opt.diag_interval;
    bool off_cone = false;

    auto stop = [&](std::string why) {
        res.stop_reason = std::move(why);
        res.final_state = state;
        if (res.records.empty() || res.records.back().tau != state.spherical.tau) emit(state);
        return res;
    };

    while (state.spherical.tau < opt.tau_end * (1.0 - 1e-14)) {
        if (res.steps >= opt.max_steps) return stop("step limit reached");
        const double tau = state.spherical.tau;
        StepProbe pr;
        try {
            pr = probe(state, true);
        } catch (const std::domain_error& e) {
            log_event(res.events, {"SpeedUndefined", tau, state.spherical.t, -1, 0.0, e.what()});
            return stop(e.what());
        }
        if (strict && pr.min_kappaQ < opt.guard_band) {
            res.horoconvexity_lost = true;
            res.stopped_on_guard = true;
            log_event(res.events, {"HoroConvexityLost", tau, state.spherical.t, pr.min_cell, pr.min_kappaQ,
                                   "min kappa Q below the guard band"});
            return stop("horo-convexity guard band crossed");
        }
        if (!strict && !(pr.min_kappaQ > 0.0)) {
            if (!res.horoconvexity_lost)
                log_event(res.events, {"HoroConvexityLost", tau, state.spherical.t, pr.min_cell, pr.min_kappaQ,
                                       "shifted curvature became nonpositive; continuing"});
            res.horoconvexity_lost = true;
            off_cone = true;
            if (!state.fn.extends_off_cone()) return stop("curvature function undefined off the positive cone");
        }

        double dtau = opt.fixed_dtau > 0.0 ? opt.fixed_dtau
                                           : opt.cfl * std::pow(state.sigma.spacing(), 2) / pr.max_diffusivity;
        dtau = std::min({dtau, next_diag - tau, opt.tau_end - tau});

        FlowState next = state;
        bool ok = false;
        for (int attempt = 0; attempt < 5 && !ok; ++attempt, dtau *= 0.5) {
            try {
                next = step(state, dtau, opt.rematch, off_cone || !strict);
            } catch (const HoroConvexityLost& e) {
                res.horoconvexity_lost = true;
                if (strict) res.stopped_on_guard = true;
                log_event(res.events, {"HoroConvexityLost", e.tau, state.spherical.t, e.cell, e.kappa, e.what()});
                return stop(e.what());
            } catch (const std::domain_error& e) {
                log_event(res.events, {"SpeedUndefined", tau, state.spherical.t, -1, 0.0, e.what()});
                return stop(e.what());
            }
            ok = std::all_of(next.sigma.u.begin(), next.sigma.u.end(), [](double x) { return std::isfinite(x); });
        }
        if (!ok) {
            log_event(res.events, {"NonFinite", tau, state.spherical.t, -1, 0.0, "step rejected five times"});
            return stop("non-finite solution");
        }
        const double dt = next.spherical.t - state.spherical.t;
        state = std::move(next);
        ++res.steps;

        lower = advance_radius(lower, dt, p, n);
        upper = state.spherical.t >= upper_blowup ? std::numeric_limits<double>::infinity()
                                                  : advance_radius(upper, dt, p, n);
        const AxisymProfile u = state.surface();
        const auto [umin, umax] = extremes(u);
        const double margin = std::min(umin - lower, upper - umax);
        res.worst_barrier_margin = std::min(res.worst_barrier_margin, margin);
        if (margin < -opt.barrier_tol)
            log_event(res.events, {"BarrierViolation", state.spherical.tau, state.spherical.t, -1, margin,
                                   "surface left the spherical barriers"});
        const double excess = (umax - umin) - res.initial_osc - std::numbers::ln2;
        res.worst_osc_excess = std::max(res.worst_osc_excess, excess);
        if (excess > 0.0)
            log_event(res.events, {"OscillationBound", state.spherical.tau, state.spherical.t, -1, excess,
                                   "osc(u) exceeded osc(u0) + ln 2"});
        for (double x : state.sigma.u) res.max_abs_sigma = std::max(res.max_abs_sigma, std::abs(x));

        if (state.spherical.tau >= next_diag * (1.0 - 1e-12)) {
            emit(state);
            next_diag += opt.diag_interval;
        }
    }
    res.completed = true;
    return stop("reached tau_end");
}

}  // namespace horoflow
