#pragma once

#include "horoflow/graphcurv.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

// A quartic graph patch in the upper half-space model of H^3 that is
// horo-convex but loses horo-convexity at once under the shifted inverse
// mean curvature flow with large power p.
namespace horoflow {

struct QuarticParams {
    double a2 = 1.0;
    double b2 = 1.0;
    double c3 = 10.0;

    [[nodiscard]] static constexpr double c1() { return 0.25; }
    [[nodiscard]] double c2() const { return 2.0 * b2 * b2 / a2 + 0.25; }
    /// Throws unless a2, b2, c3 are positive and finite.
    void validate() const;
};

/// Value and partial derivatives of the height function at one point.
/// Higher orders than requested are left at zero.
struct QuarticJet {
    double value = 0.0;
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
    std::array<double, 8> third{};
    std::array<double, 16> fourth{};

    [[nodiscard]] double d3(int i, int j, int k) const { return third[static_cast<size_t>((i * 2 + j) * 2 + k)]; }
    [[nodiscard]] double d4(int i, int j, int k, int l) const
    {
        return fourth[static_cast<size_t>(((i * 2 + j) * 2 + k) * 2 + l)];
    }
};

/// u(x) = (c1/24) x1^4 + (a2 + b2 x1 + c2 x1^2 / 2) x2^2 / 2 + c3.
[[nodiscard]] QuarticJet u_breve(const QuarticParams& q, double x1, double x2, int order = 4);

/// Induced metric, shifted Weingarten map and shifted principal curvatures
/// of the graph x3 = u(x1, x2) in the half-space metric |dx|^2 / x3^2.
[[nodiscard]] ShiftBundle halfspace_shift_weingarten(const QuarticParams& q, double x1, double x2);
/// Shifted second fundamental form h_ij - g_ij (lower indices).
[[nodiscard]] Eigen::Matrix2d halfspace_shifted_form(const QuarticParams& q, double x1, double x2);

/// Tensors at the origin, where the Christoffel symbols vanish.
struct OriginJet {
    Eigen::Matrix2d g;
    Eigen::Matrix2d h;        // lower indices
    Eigen::Matrix2d h_shift;  // h - g
    std::array<double, 8> dh{};    // nabla_k h_ij at [(k*2+i)*2+j]
    std::array<double, 16> ddh{};  // nabla_l nabla_k h_ij at [((l*2+k)*2+i)*2+j]

    [[nodiscard]] double nabla(int k, int i, int j) const { return dh[static_cast<size_t>((k * 2 + i) * 2 + j)]; }
    [[nodiscard]] double nabla2(int l, int k, int i, int j) const
    {
        return ddh[static_cast<size_t>(((l * 2 + k) * 2 + i) * 2 + j)];
    }
};

/// Closed-form covariant derivatives at the origin in terms of the partial
/// derivatives of u.
[[nodiscard]] OriginJet origin_jet(const QuarticParams& q);

/// d(h_shift_11)/dt at the origin under dX/dt = H_shift^{-p} nu, where
/// H_shift = H - 2: the closed form and the value assembled term by term
/// from the evolution equation of the shifted second fundamental form.
struct RateReport {
    double closed_form = 0.0;
    double assembled = 0.0;
    double shifted_mean = 0.0;  // H_shift at the origin
};

[[nodiscard]] RateReport dh11_rate(const QuarticParams& q, double p);
/// The rate is negative exactly when p exceeds 1 + a2 / (2 b2^2).
[[nodiscard]] double sign_threshold(const QuarticParams& q);

struct WindowReport {
    double min_excess = 0.0;     // min over the punctured patch of lambda_min - 1
    Eigen::Vector2d min_location = Eigen::Vector2d::Zero();
    double origin_excess = 0.0;  // lambda_min - 1 at the origin
    double coeff_x1x1 = 0.0;     // quadratic coefficients of lambda_1(h_euclid u v)
    double coeff_x2x2 = 0.0;
    double coeff_x1x2 = 0.0;
    int samples = 0;
    [[nodiscard]] bool horoconvex() const { return min_excess > 0.0 && origin_excess >= -1e-14; }
};

/// Samples lambda_min - 1 on a grid x grid lattice clipped to the disk of
/// radius r and fits lambda_1(h_euclid u v) by monomials of degree 2 to 4.
/// Throws std::invalid_argument for r > 0.1 or grid < 5.
[[nodiscard]] WindowReport horoconvexity_window(const QuarticParams& q, double r, int grid = 41);

/// Lower bound beta c3 + 1/v on the principal curvatures of a graph whose
/// Euclidean curvatures are at least beta and whose height is at least c3.
[[nodiscard]] double far_field_lower_bound(double beta, double c3, double v);

/// JSON report with params, both rates, window data and the sign prediction.
[[nodiscard]] std::string counterexample_json(const QuarticParams& q, double p, double r = 0.02, int grid = 41);

}  // namespace horoflow
