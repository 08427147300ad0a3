#include "horoflow/hypgeom.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace horoflow {

BallRadius polar_to_ball(double u)
{
    if (u < 0.0) throw std::domain_error("polar_to_ball: u must be >= 0");
    return {std::tanh(0.5 * u), 1.0 + std::cosh(u)};
}

double ball_to_polar(double r)
{
    if (r < 0.0 || r >= 1.0) throw std::domain_error("ball_to_polar: r must lie in [0,1)");
    return 2.0 * std::atanh(r);
}

namespace {

double shift_offset(double u, double v)
{
    // (1 - 1/v) + 2/((e^u+1) v)
    return (v - 1.0) / v + 2.0 / ((std::exp(u) + 1.0) * v);
}

}  // namespace

double ball_curvature_from_shifted(double kappa, double u, double v)
{
    if (u <= 0.0 || v < 1.0) throw std::domain_error("ball curvature relation needs u > 0, v >= 1");
    return polar_to_ball(u).epsi * (kappa + shift_offset(u, v));
}

double shifted_from_ball_curvature(double lambda_ball, double u, double v)
{
    if (u <= 0.0 || v < 1.0) throw std::domain_error("ball curvature relation needs u > 0, v >= 1");
    return lambda_ball / polar_to_ball(u).epsi - shift_offset(u, v);
}

HyperboloidPoint polar_to_hyperboloid(const PolarPoint& p)
{
    HyperboloidPoint h;
    h.X.head<3>() = std::sinh(p.r) * p.dir;
    h.X(3) = std::cosh(p.r);
    return h;
}

PolarPoint hyperboloid_to_polar(const HyperboloidPoint& p)
{
    const double s = p.X.head<3>().norm();
    PolarPoint q;
    q.r = std::asinh(s);
    q.dir = s > 0.0 ? Eigen::Vector3d(p.X.head<3>() / s) : Eigen::Vector3d::UnitZ();
    return q;
}

BallPoint hyperboloid_to_ball(const HyperboloidPoint& p)
{
    return {p.X.head<3>() / (1.0 + p.X(3))};
}

HyperboloidPoint ball_to_hyperboloid(const BallPoint& p)
{
    const double r2 = p.x.squaredNorm();
    if (r2 >= 1.0) throw std::domain_error("ball point outside the unit ball");
    HyperboloidPoint h;
    h.X.head<3>() = 2.0 * p.x / (1.0 - r2);
    h.X(3) = (1.0 + r2) / (1.0 - r2);
    return h;
}

double geodesic_distance(const HyperboloidPoint& a, const HyperboloidPoint& b)
{
    const double c = -minkowski(a.X, b.X);
    if (c > 2.0) return std::acosh(c);
    const Eigen::Vector4d w = a.X - b.X;
    const double m = std::max(minkowski(w, w), 0.0);
    return 2.0 * std::asinh(0.5 * std::sqrt(m));
}

Eigen::Matrix4d axial_boost(double d)
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(2, 2) = m(3, 3) = std::cosh(d);
    m(2, 3) = m(3, 2) = std::sinh(d);
    return m;
}

SphereFit fit_sphere(const std::vector<HyperboloidPoint>& points)
{
    const auto m = static_cast<Eigen::Index>(points.size());
    if (m < 4) throw std::invalid_argument("fit_sphere needs at least 4 points");

    // |x|^2 = 2 c.x + e  with e = rho^2 - |c|^2
    Eigen::MatrixXd A(m, 4);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Vector3d x = hyperboloid_to_ball(points[static_cast<size_t>(i)]).x;
        A.row(i) << 2.0 * x.transpose(), 1.0;
        rhs(i) = x.squaredNorm();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4) throw std::invalid_argument("fit_sphere: degenerate point set");
    const Eigen::Vector4d sol = qr.solve(rhs);

    const Eigen::Vector3d c = sol.head<3>();
    const double rho2 = sol(3) + c.squaredNorm();
    if (!(rho2 > 0.0)) throw std::invalid_argument("fit_sphere: degenerate point set");
    const double rho = std::sqrt(rho2);
    const double cn = c.norm();
    if (cn + rho >= 1.0) throw std::invalid_argument("fit_sphere: fitted sphere leaves the ball");

    // The diameter through the Euclidean center is a geodesic; its endpoints
    // fix the hyperbolic center and radius.
    const Eigen::Vector3d axis = cn > 0.0 ? Eigen::Vector3d(c / cn) : Eigen::Vector3d::UnitZ();
    const double far = 2.0 * std::atanh(cn + rho);
    const double near = 2.0 * std::atanh(cn - rho);
    const double s = 0.5 * (far + near);

    SphereFit fit;
    fit.radius = 0.5 * (far - near);
    fit.center = polar_to_hyperboloid({std::abs(s), s >= 0.0 ? axis : Eigen::Vector3d(-axis)});
    for (const auto& p : points)
        fit.hausdorff = std::max(fit.hausdorff, std::abs(geodesic_distance(fit.center, p) - fit.radius));
    return fit;
}

HyperboloidPoint to_hyperboloid(const ModelPoint& p)
{
    switch (p.model) {
    case PointModel::Polar: {
        const Eigen::Vector3d dir = p.x.tail<3>();
        if (std::abs(dir.norm() - 1.0) > 1e-9) throw std::invalid_argument("polar direction is not a unit vector");
        if (p.x(0) < 0.0) throw std::invalid_argument("polar radius must be >= 0");
        return polar_to_hyperboloid({p.x(0), dir});
    }
    case PointModel::Ball:
        return ball_to_hyperboloid({p.x.head<3>()});
    case PointModel::Hyperboloid: {
        HyperboloidPoint h{p.x};
        if (std::abs(minkowski(h.X, h.X) + 1.0) > 1e-8 || h.X(3) <= 0.0)
            throw std::invalid_argument("point is not on the upper hyperboloid sheet");
        return h;
    }
    }
    throw std::invalid_argument("unknown point model");
}

ModelPoint from_hyperboloid(const HyperboloidPoint& p, PointModel model)
{
    ModelPoint out{model, Eigen::Vector4d::Zero()};
    switch (model) {
    case PointModel::Polar: {
        const PolarPoint q = hyperboloid_to_polar(p);
        out.x << q.r, q.dir;
        break;
    }
    case PointModel::Ball:
        out.x.head<3>() = hyperboloid_to_ball(p).x;
        break;
    case PointModel::Hyperboloid:
        out.x = p.X;
        break;
    }
    return out;
}

std::string to_string(PointModel m)
{
    switch (m) {
    case PointModel::Polar: return "polar";
    case PointModel::Ball: return "ball";
    case PointModel::Hyperboloid: return "hyperboloid";
    }
    return "?";
}

void write_point_cloud(std::ostream& os, const std::vector<HyperboloidPoint>& pts, PointModel model)
{
    os << "model,x0,x1,x2,x3\n";
    os.precision(17);
    for (const auto& p : pts) {
        const ModelPoint q = from_hyperboloid(p, model);
        os << to_string(model);
        for (int i = 0; i < 4; ++i) os << ',' << q.x(i);
        os << '\n';
    }
}

std::vector<HyperboloidPoint> read_point_cloud(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty point cloud");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "model,x0,x1,x2,x3") throw std::invalid_argument("bad point cloud header: " + line);

    std::vector<HyperboloidPoint> pts;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        ModelPoint p{PointModel::Polar, Eigen::Vector4d::Zero()};
        if (field == "polar") p.model = PointModel::Polar;
        else if (field == "ball") p.model = PointModel::Ball;
        else if (field == "hyperboloid") p.model = PointModel::Hyperboloid;
        else throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown model " + field);
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ss, field, ','))
                throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 5 fields");
            try {
                p.x(i) = std::stod(field);
            } catch (const std::exception&) {
                throw std::invalid_argument("line " + std::to_string(lineno) + ": bad number " + field);
            }
        }
        pts.push_back(to_hyperboloid(p));
    }
    return pts;
}

}  // namespace horoflow
