#pragma once

#include "horoflow/curvfun.hpp"
#include "horoflow/grid.hpp"
#include "horoflow/spherical.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Axisymmetric flow of radial graphs u(phi, t) in H^3, evolved as the
// deviation sigma = u - theta from a round solution in rescaled time tau.
namespace horoflow {

/// Thrown when a shifted curvature is not positive at some cell.
class HoroConvexityLost : public std::runtime_error {
public:
    HoroConvexityLost(int cell, double tau, double kappa);
    int cell;
    double tau;
    double kappa;
};

/// How the round solution theta(tau) follows the surface.
///   Mean: theta's additive constant tracks the mean of u, so sigma stays
///         mean-free (the degree-0 mode is otherwise linearly unstable).
///   None: theta = theta0 + n^{-p} tau with theta0 frozen at the start.
enum class Rematch { Mean, None };

/// Strict stops the run when min kappa Q drops below the guard band; Record
/// logs the first loss of horo-convexity and continues while the speed is
/// defined. Auto picks Strict for p <= 1 and Record otherwise.
enum class ConvexityGuard { Auto, Strict, Record };

struct FlowState {
    SphericalState spherical;
    AxisymProfile sigma;
    CurvatureFunction fn;
    double p = 1.0;

    FlowState(SphericalState sph, AxisymProfile sig, CurvatureFunction f, double power);

    /// Matches theta0 to the mean (degree-0 Legendre mode) of u.
    [[nodiscard]] static FlowState from_surface(const AxisymProfile& u, const CurvatureFunction& fn,
                                                double p);

    [[nodiscard]] int n() const { return fn.dim(); }
    /// u = sigma + theta.
    [[nodiscard]] AxisymProfile surface() const;
};

/// dsigma/dtau = v / F(kappa Q)^p - n^{-p} per cell. With allow_off_cone,
/// cells with kappa <= 0 are evaluated when F extends there; otherwise they
/// raise HoroConvexityLost. A nonpositive speed raises std::domain_error.
[[nodiscard]] std::vector<double> rescaled_rhs(const FlowState& s, bool allow_off_cone = false);

struct StepProbe {
    double max_diffusivity = 0.0;  // largest coefficient of u_phiphi in the rhs
    double min_kappaQ = std::numeric_limits<double>::infinity();
    int min_cell = -1;
};

[[nodiscard]] StepProbe probe(const FlowState& s, bool allow_off_cone = false);
/// cfl * (pi/n_grid)^2 / max diffusivity.
[[nodiscard]] double stable_dtau(const FlowState& s, double cfl);

/// One classical RK4 step in tau; sigma, theta, tau and t advance together.
[[nodiscard]] FlowState step(const FlowState& s, double dtau, Rematch rematch = Rematch::Mean,
                             bool allow_off_cone = false);

struct FlowOptions {
    double tau_end = 1.0;
    double cfl = 0.2;
    double fixed_dtau = 0.0;      // > 0 overrides the CFL step
    double diag_interval = 0.1;   // in tau
    Rematch rematch = Rematch::Mean;
    ConvexityGuard guard = ConvexityGuard::Auto;
    double guard_band = 1e-3;     // strict stop threshold on min kappa Q
    double barrier_tol = 1e-7;
    int modes = 8;
    int hausdorff_azimuths = 8;
    bool track_center = true;
    long max_steps = 50'000'000;
};

struct DiagnosticsRecord {
    double tau = 0.0;
    double t = 0.0;
    double theta = 0.0;
    double anchor = 0.0;  // theta at tau = 0 after rematching
    double osc_u = 0.0;
    double pinch_ratio = 1.0;
    double kappaQ_min = 1.0, kappaQ_max = 1.0;
    double FQ_min = 0.0, FQ_max = 0.0;
    double hausdorff = 0.0;
    double center_offset = 0.0;
    double osc_centered = 0.0;
    double v_minus_1_max = 0.0;
    double max_abs_sigma = 0.0;
    double barrier_lower = 0.0, barrier_upper = 0.0;
    double u_min = 0.0, u_max = 0.0;
    std::vector<double> mode_amps;
};

[[nodiscard]] DiagnosticsRecord diagnose(const FlowState& s, const FlowOptions& opt);

struct FlowEvent {
    std::string kind;  // HoroConvexityLost, BarrierViolation, OscillationBound, NonFinite, SpeedUndefined
    double tau = 0.0;
    double t = 0.0;
    int cell = -1;
    double value = 0.0;
    std::string detail;
    long count = 1;  // repeated occurrences are folded into the first event
};

struct RunResult {
    explicit RunResult(FlowState s) : final_state(std::move(s)) {}

    std::vector<DiagnosticsRecord> records;
    std::vector<FlowEvent> events;
    FlowState final_state;
    long steps = 0;
    bool completed = false;
    bool horoconvexity_lost = false;
    bool stopped_on_guard = false;
    std::string stop_reason;
    double initial_osc = 0.0;
    double max_abs_sigma = 0.0;
    double barrier_tol = 0.0;
    /// min over steps of min(u_min - lower barrier, upper barrier - u_max)
    double worst_barrier_margin = std::numeric_limits<double>::infinity();
    /// max over steps of osc(u) - osc(u0) - ln 2
    double worst_osc_excess = -std::numeric_limits<double>::infinity();

    [[nodiscard]] bool barriers_held() const { return worst_barrier_margin >= -barrier_tol; }
    [[nodiscard]] bool oscillation_bound_held() const { return worst_osc_excess <= 0.0; }
    [[nodiscard]] bool has_event(const std::string& kind) const;
};

/// Validates the initial surface (positive, horo-convex) and integrates to
/// tau_end. `on_record` sees each diagnostics record as it is produced.
[[nodiscard]] RunResult run(const FlowState& initial, const FlowOptions& opt,
                            const std::function<void(const DiagnosticsRecord&)>& on_record = {});

}  // namespace horoflow
