#include "horoflow/grid.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace horoflow {

AxisymProfile AxisymProfile::from_function(int n_grid, const std::function<double(double)>& f)
{
    AxisymProfile p;
    p.u.resize(static_cast<size_t>(n_grid));
    for (int j = 0; j < n_grid; ++j) p.u[static_cast<size_t>(j)] = f(cell_angle(j, n_grid));
    return p;
}

AxisymProfile AxisymProfile::constant(int n_grid, double value)
{
    return AxisymProfile(std::vector<double>(static_cast<size_t>(n_grid), value));
}

void AxisymProfile::validate() const
{
    if (n_grid() < kMinGrid)
        throw std::invalid_argument("grid too coarse: n_grid = " + std::to_string(n_grid()) +
                                    " < " + std::to_string(kMinGrid));
    for (int j = 0; j < n_grid(); ++j) {
        const double x = u[static_cast<size_t>(j)];
        if (!std::isfinite(x) || x <= 0.0)
            throw std::invalid_argument("profile value at cell " + std::to_string(j) +
                                        " must be finite and positive");
    }
}

void axisym_derivatives(std::span<const double> u, std::span<double> d1, std::span<double> d2)
{
    const int n = static_cast<int>(u.size());
    if (n < 3) throw std::invalid_argument("axisym_derivatives: need at least 3 cells");
    const double h = std::numbers::pi / n;
    const double c1 = 1.0 / (12.0 * h);
    const double c2 = 1.0 / (12.0 * h * h);
    auto at = [&](int j) {
        if (j < 0) j = -1 - j;
        else if (j >= n) j = 2 * n - 1 - j;
        return u[static_cast<size_t>(j)];
    };
    for (int j = 0; j < n; ++j) {
        const double um2 = at(j - 2), um1 = at(j - 1), u0 = at(j), up1 = at(j + 1), up2 = at(j + 2);
        d1[static_cast<size_t>(j)] = (8.0 * (up1 - um1) - (up2 - um2)) * c1;
        // differences from the centre value keep constants exactly flat
        d2[static_cast<size_t>(j)] = (16.0 * ((um1 - u0) + (up1 - u0)) - ((um2 - u0) + (up2 - u0))) * c2;
    }
}

std::pair<double, double> pole_values(std::span<const double> u)
{
    const size_t n = u.size();
    if (n < 3) throw std::invalid_argument("pole_values: need at least 3 cells");
    // even polynomial in phi through the three nearest cells, evaluated at 0
    auto pole = [](double a, double b, double c) { return (150.0 * a - 25.0 * b + 3.0 * c) / 128.0; };
    return {pole(u[0], u[1], u[2]), pole(u[n - 1], u[n - 2], u[n - 3])};
}

std::vector<double> fejer_weights(int n_grid)
{
    std::vector<double> w(static_cast<size_t>(n_grid));
    const int half = n_grid / 2;
    for (int j = 0; j < n_grid; ++j) {
        const double th = cell_angle(j, n_grid);
        double s = 0.0;
        for (int m = 1; m <= half; ++m) s += std::cos(2.0 * m * th) / (4.0 * m * m - 1.0);
        w[static_cast<size_t>(j)] = 2.0 / n_grid * (1.0 - 2.0 * s);
    }
    return w;
}

double lagrange_interpolate(std::span<const double> x, std::span<const double> y, double xq, int order)
{
    const int m = static_cast<int>(x.size());
    if (m < order || static_cast<int>(y.size()) != m)
        throw std::invalid_argument("lagrange_interpolate: not enough nodes");
    const auto it = std::lower_bound(x.begin(), x.end(), xq);
    int start = static_cast<int>(it - x.begin()) - order / 2;
    start = std::clamp(start, 0, m - order);
    double out = 0.0;
    for (int i = start; i < start + order; ++i) {
        double li = 1.0;
        for (int k = start; k < start + order; ++k)
            if (k != i) li *= (xq - x[static_cast<size_t>(k)]) / (x[static_cast<size_t>(i)] - x[static_cast<size_t>(k)]);
        out += li * y[static_cast<size_t>(i)];
    }
    return out;
}

void reflect_across_poles(std::vector<double>& angle, std::vector<double>& value, int pad)
{
    const size_t n = angle.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return angle[a] < angle[b]; });

    std::vector<double> a, v;
    const size_t p = std::min<size_t>(static_cast<size_t>(pad), n);
    for (size_t k = p; k-- > 0;) {
        a.push_back(-angle[idx[k]]);
        v.push_back(value[idx[k]]);
    }
    for (size_t k = 0; k < n; ++k) {
        a.push_back(angle[idx[k]]);
        v.push_back(value[idx[k]]);
    }
    for (size_t k = 0; k < p; ++k) {
        a.push_back(2.0 * std::numbers::pi - angle[idx[n - 1 - k]]);
        v.push_back(value[idx[n - 1 - k]]);
    }
    angle = std::move(a);
    value = std::move(v);
}

}  // namespace horoflow
