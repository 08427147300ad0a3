#pragma once

#include <cmath>

// Exact round solutions: geodesic spheres expanding with speed n^{-p} Q^p.
namespace horoflow {

/// Q(theta) = (e^{2 theta} - 1)/2, the reciprocal shifted curvature of a
/// sphere of radius theta.
[[nodiscard]] inline double sphere_q(double theta) { return 0.5 * std::expm1(2.0 * theta); }

struct SphericalState {
    double t = 0.0;       // original time
    double tau = 0.0;     // rescaled time, dtau/dt = Q^p
    double theta = 0.0;   // sphere radius
    double Q = 0.0;
    double theta0 = 0.0;  // radius at tau = 0, so theta = theta0 + n^{-p} tau

    [[nodiscard]] static SphericalState at_tau(double theta0, double p, int n, double tau);
};

enum class Clock { Original, Rescaled };

/// Sphere of initial radius theta0 after `time` on the chosen clock. The
/// original clock integrates d theta/dt adaptively (Dormand-Prince); the
/// rescaled clock is exact in theta and integrates t by quadrature.
/// Throws std::domain_error when time >= T*.
[[nodiscard]] SphericalState spherical_solve(double theta0, double p, int n, double time,
                                             Clock clock = Clock::Original);

/// T* = integral over Q in (Q0, inf) of n^p Q^{-p} / (2Q + 1).
[[nodiscard]] double maximal_time(double theta0, double p, int n);

/// Original time for a sphere to grow from radius theta_a to theta_b.
[[nodiscard]] double elapsed_time(double theta_a, double theta_b, double p, int n);

/// Radius after time dt starting from radius r; +infinity once the sphere
/// has blown up.
[[nodiscard]] double advance_radius(double r, double dt, double p, int n);

}  // namespace horoflow
