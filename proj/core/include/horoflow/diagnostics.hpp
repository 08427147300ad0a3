#pragma once

#include "horoflow/curvfun.hpp"
#include "horoflow/grid.hpp"

#include <span>
#include <utility>
#include <vector>

// Reductions over a profile and the asymptotic quantities tracked along a run.
namespace horoflow {

/// max over cells of kappa_max / kappa_min; +infinity if some kappa <= 0.
[[nodiscard]] double pinch_ratio(const AxisymProfile& p);

struct RescaledRange {
    double kappaQ_min = 0.0;
    double kappaQ_max = 0.0;
    double FQ_min = 0.0;
    double FQ_max = 0.0;
};

/// Extremes of kappa_i Q and F(kappa) Q over the grid.
[[nodiscard]] RescaledRange rescaled_curvature_range(const AxisymProfile& p, double Q,
                                                     const CurvatureFunction& fn);

/// a_k = (2k+1)/2 * integral of sigma P_k(cos phi) sin phi, k = 0..K.
/// Requires K <= n_grid / 4.
[[nodiscard]] std::vector<double> mode_amplitudes(std::span<const double> sigma, int max_degree);
/// sum_k a_k P_k(cos phi_j) on an n_grid cell grid.
[[nodiscard]] std::vector<double> mode_synthesis(std::span<const double> amps, int n_grid);

/// A(theta) = 2p / (n^{p+1} (1 - e^{-2 theta})).
[[nodiscard]] double linearized_coefficient(int n, double p, double theta);
/// Limit of A(theta) as theta -> infinity.
[[nodiscard]] double asymptotic_coefficient(int n, double p);
/// Growth rate A(theta) (n - k(n - 1 + k)) of the degree-k spherical harmonic.
[[nodiscard]] double linearized_rate(int n, double p, double theta, int k);
/// L2 decay rate 2(n + 2) A(theta) of the mean-free, translation-free part.
[[nodiscard]] double bulk_decay_rate(int n, double p, double theta);

/// Radial graph of the same surface about the point at signed distance d on
/// the symmetry axis, resampled by monotone cubic interpolation. Throws
/// std::domain_error if the surface is not star-shaped about that point.
[[nodiscard]] AxisymProfile recentre(const AxisymProfile& p, double d);
/// Oscillation about the axis point d, from the transformed cells and poles.
[[nodiscard]] double recentred_oscillation(const AxisymProfile& p, double d);

struct CenterSearch {
    double offset = 0.0;      // d*
    double oscillation = 0.0;  // osc about d*
    AxisymProfile recentred;
};

/// Golden-section search for the axis point minimizing the oscillation.
[[nodiscard]] CenterSearch optimal_center(const AxisymProfile& p, double tol = 1e-10);

/// Hausdorff distance from the surface to its least-squares geodesic sphere.
[[nodiscard]] double hausdorff_roundness(const AxisymProfile& p, int azimuths = 8);

struct DecayFit {
    double exponent = 0.0;  // gamma in value ~ C e^{-gamma tau}
    double log_prefactor = 0.0;
    double r_squared = 1.0;
    int points = 0;
};

/// Least-squares fit of log(value) against tau over the trailing `window`
/// fraction of the tau range. Throws std::invalid_argument on nonpositive
/// values inside the window.
[[nodiscard]] DecayFit fit_decay(std::span<const std::pair<double, double>> series, double window);

}  // namespace horoflow
