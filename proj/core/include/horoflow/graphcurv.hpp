#pragma once

#include "horoflow/grid.hpp"
#include "horoflow/hypgeom.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace horoflow {

/// Geometry of a radial graph at one point.
struct ShiftBundle {
    double v = 1.0;
    Eigen::MatrixXd g;        // induced metric, lower indices
    Eigen::MatrixXd W_shift;  // h_i^j - delta_i^j, row i column j
    Eigen::VectorXd kappa;    // ascending
};

/// Derivatives of u are components in an orthonormal frame of the round
/// metric at the point.
[[nodiscard]] ShiftBundle shift_weingarten(double u, const Eigen::VectorXd& grad_u,
                                           const Eigen::MatrixXd& hess_u);

/// Shifted curvatures of the axisymmetric graph at one cell.
struct CellCurvature {
    double meridian;
    double parallel;
    double v;
};

[[nodiscard]] CellCurvature axisym_cell(double u, double u_phi, double u_phiphi, double cot_phi);

struct AxisymCurvatures {
    std::vector<double> kappa_meridian;
    std::vector<double> kappa_parallel;
    std::vector<double> v;
};

[[nodiscard]] AxisymCurvatures axisym_curvatures(const AxisymProfile& p);

/// Brute-force shifted curvatures at polar angle phi of the surface of
/// revolution r = u(phi), from finite-difference fundamental forms of the
/// hyperboloid embedding. Test oracle; independent of the closed formulas.
[[nodiscard]] std::pair<double, double> embedding_oracle(const std::function<double(double)>& u,
                                                         double phi, double h_step);

/// max u - min u, including extrapolated pole values.
[[nodiscard]] double oscillation(const AxisymProfile& p);
/// max over cells of (v - 1) e^{2u}.
[[nodiscard]] double gradient_bound_check(const AxisymProfile& p);

/// Points of the surface of revolution on the hyperboloid: every cell at
/// `azimuths` equally spaced longitudes, plus both poles.
[[nodiscard]] std::vector<HyperboloidPoint> surface_points(const AxisymProfile& p, int azimuths);

/// CSV with header phi,u,kappa_meridian,kappa_parallel,v.
void write_profile_csv(std::ostream& os, const AxisymProfile& p);
/// Reads the phi,u columns of a profile CSV (extra columns ignored).
[[nodiscard]] AxisymProfile read_profile_csv(std::istream& is);

}  // namespace horoflow
