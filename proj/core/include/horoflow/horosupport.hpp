#pragma once

#include "horoflow/curvfun.hpp"
#include "horoflow/grid.hpp"
#include "horoflow/hypgeom.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <vector>

// Horospherical support functions of axisymmetric horo-convex bodies.
namespace horoflow {

/// s(phi) on the same cell-centred grid as AxisymProfile.
struct SupportProfile {
    std::vector<double> s;

    SupportProfile() = default;
    explicit SupportProfile(std::vector<double> values) : s(std::move(values)) {}

    [[nodiscard]] static SupportProfile from_function(int n_grid, const std::function<double(double)>& f);

    [[nodiscard]] int n_grid() const { return static_cast<int>(s.size()); }
    [[nodiscard]] double phi(int j) const { return cell_angle(j, n_grid()); }

    /// s_phi and s_phiphi by the graph stencils.
    void derivatives(std::vector<double>& d1, std::vector<double>& d2) const;
    void validate() const;
};

/// Surface points X(z) for z at every cell (and `azimuths` longitudes).
[[nodiscard]] std::vector<HyperboloidPoint> embed_support(const SupportProfile& sp, int azimuths = 1);

/// A_ij[s] in the orthonormal (phi, eta) frame; diagonal for axisymmetric s.
[[nodiscard]] std::vector<Eigen::Matrix2d> a_matrix(const SupportProfile& sp);

/// True when A is positive definite at every cell.
[[nodiscard]] bool is_horoconvex(const SupportProfile& sp);

struct SupportCurvatures {
    std::vector<double> kappa_meridian;
    std::vector<double> kappa_parallel;
};

/// kappa = e^{-s} / (eigenvalues of A), paired with the direction on the sphere.
[[nodiscard]] SupportCurvatures curvature_from_support(const SupportProfile& sp);

/// ds/dt = e^{ps} F_*(A)^p per cell.
[[nodiscard]] std::vector<double> support_flow_rhs(const SupportProfile& sp, const CurvatureFunction& fn,
                                                   double p);

/// Radial graph of the embedded surface resampled onto an n_grid cell grid.
[[nodiscard]] AxisymProfile radial_graph_from_support(const SupportProfile& sp, int n_grid);

struct CrossCheck {
    double max_meridian_diff = 0.0;
    double max_parallel_diff = 0.0;
    double max_norm_defect = 0.0;  // max |<X,X> + 1| of the embedded cloud
    AxisymProfile graph;
};

/// Compares support-route curvatures with graph-route curvatures of the
/// resampled radial graph, at the graph cells.
[[nodiscard]] CrossCheck compare_with_graph(const SupportProfile& sp, int n_grid);

void write_support_csv(std::ostream& os, const SupportProfile& sp);
[[nodiscard]] SupportProfile read_support_csv(std::istream& is);

}  // namespace horoflow
