#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

// Cell-centred polar-angle grid on S^2 for axisymmetric data.
namespace horoflow {

inline constexpr int kMinGrid = 16;

[[nodiscard]] inline double cell_angle(int j, int n_grid)
{
    return (j + 0.5) * std::numbers::pi / n_grid;
}

/// Radial graph u(phi) sampled at phi_j = (j + 1/2) pi / n_grid.
struct AxisymProfile {
    std::vector<double> u;
    double t = 0.0;
    double tau = 0.0;

    AxisymProfile() = default;
    explicit AxisymProfile(std::vector<double> values) : u(std::move(values)) {}

    [[nodiscard]] static AxisymProfile from_function(int n_grid, const std::function<double(double)>& f);
    [[nodiscard]] static AxisymProfile constant(int n_grid, double value);

    [[nodiscard]] int n_grid() const { return static_cast<int>(u.size()); }
    [[nodiscard]] double phi(int j) const { return cell_angle(j, n_grid()); }
    [[nodiscard]] double spacing() const { return std::numbers::pi / n_grid(); }

    /// Throws unless n_grid >= kMinGrid and every value is finite and positive.
    void validate() const;
};

/// First and second phi-derivatives by 4th-order central differences with
/// even-reflection ghost cells at both poles.
void axisym_derivatives(std::span<const double> u, std::span<double> d1, std::span<double> d2);

/// Values at phi = 0 and phi = pi from even extrapolation (6th order).
[[nodiscard]] std::pair<double, double> pole_values(std::span<const double> u);

/// Weights w_j with sum_j w_j g(cos phi_j) ~ integral of g over [-1, 1]
/// (Fejer's first rule on the cell centres).
[[nodiscard]] std::vector<double> fejer_weights(int n_grid);

/// Local Lagrange interpolation through the `order` nodes nearest to xq.
/// Nodes must be strictly increasing.
[[nodiscard]] double lagrange_interpolate(std::span<const double> x, std::span<const double> y,
                                          double xq, int order = 6);

/// Even extension of (angle, value) samples across both poles, sorted by
/// angle, so that interpolation near 0 and pi sees data on both sides.
void reflect_across_poles(std::vector<double>& angle, std::vector<double>& value, int pad);

}  // namespace horoflow
