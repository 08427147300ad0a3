#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

// Models of hyperbolic 3-space: geodesic polar coordinates about a center,
// the Poincare ball, and the hyperboloid in R^{3,1} (time coordinate last).
namespace horoflow {

struct PolarPoint {
    double r = 0.0;
    Eigen::Vector3d dir = Eigen::Vector3d::UnitZ();
};

struct BallPoint {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
};

struct HyperboloidPoint {
    Eigen::Vector4d X = Eigen::Vector4d(0, 0, 0, 1);

    [[nodiscard]] static HyperboloidPoint origin() { return {}; }
};

/// Minkowski product with signature (+,+,+,-).
[[nodiscard]] inline double minkowski(const Eigen::Vector4d& a, const Eigen::Vector4d& b)
{
    return a.head<3>().dot(b.head<3>()) - a(3) * b(3);
}

struct BallRadius {
    double r;     // Euclidean radius in the ball
    double epsi;  // conformal factor e^psi = 2/(1-r^2)
};

[[nodiscard]] BallRadius polar_to_ball(double u);
[[nodiscard]] double ball_to_polar(double r);

/// Euclidean principal curvature in the ball from the shifted hyperbolic one.
[[nodiscard]] double ball_curvature_from_shifted(double kappa, double u, double v);
/// Inverse of ball_curvature_from_shifted.
[[nodiscard]] double shifted_from_ball_curvature(double lambda_ball, double u, double v);

[[nodiscard]] HyperboloidPoint polar_to_hyperboloid(const PolarPoint& p);
[[nodiscard]] PolarPoint hyperboloid_to_polar(const HyperboloidPoint& p);
[[nodiscard]] BallPoint hyperboloid_to_ball(const HyperboloidPoint& p);
[[nodiscard]] HyperboloidPoint ball_to_hyperboloid(const BallPoint& p);

/// Hyperbolic distance; uses the Minkowski length of the chord so that small
/// distances keep full precision.
[[nodiscard]] double geodesic_distance(const HyperboloidPoint& a, const HyperboloidPoint& b);

/// Boost along the x3 axis moving the origin to the point at signed distance d.
[[nodiscard]] Eigen::Matrix4d axial_boost(double d);

struct SphereFit {
    HyperboloidPoint center;
    double radius = 0.0;
    double hausdorff = 0.0;
};

/// Algebraic least-squares sphere in the ball model, converted back to a
/// geodesic sphere. Hausdorff distance is one-sided over the cloud.
[[nodiscard]] SphereFit fit_sphere(const std::vector<HyperboloidPoint>& points);

enum class PointModel { Polar, Ball, Hyperboloid };

struct ModelPoint {
    PointModel model;
    Eigen::Vector4d x;
};

[[nodiscard]] HyperboloidPoint to_hyperboloid(const ModelPoint& p);
[[nodiscard]] ModelPoint from_hyperboloid(const HyperboloidPoint& p, PointModel model);

/// CSV with header model,x0,x1,x2,x3. Polar rows hold r then dir; ball rows
/// leave x3 at zero.
void write_point_cloud(std::ostream& os, const std::vector<HyperboloidPoint>& pts,
                       PointModel model);
[[nodiscard]] std::vector<HyperboloidPoint> read_point_cloud(std::istream& is);

[[nodiscard]] std::string to_string(PointModel m);

}  // namespace horoflow
