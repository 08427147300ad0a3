#include "horoflow/horosupport.hpp"

#include "horoflow/graphcurv.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace horoflow {

SupportProfile SupportProfile::from_function(int n_grid, const std::function<double(double)>& f)
{
    SupportProfile sp;
    sp.s.resize(static_cast<size_t>(n_grid));
    for (int j = 0; j < n_grid; ++j) sp.s[static_cast<size_t>(j)] = f(cell_angle(j, n_grid));
    return sp;
}

void SupportProfile::derivatives(std::vector<double>& d1, std::vector<double>& d2) const
{
    d1.resize(s.size());
    d2.resize(s.size());
    axisym_derivatives(s, d1, d2);
}

void SupportProfile::validate() const
{
    if (n_grid() < kMinGrid)
        throw std::invalid_argument("support grid too coarse: n_grid = " + std::to_string(n_grid()));
    for (double x : s)
        if (!std::isfinite(x)) throw std::invalid_argument("support values must be finite");
}

std::vector<HyperboloidPoint> embed_support(const SupportProfile& sp, int azimuths)
{
    sp.validate();
    if (azimuths < 1) throw std::invalid_argument("embed_support: azimuths must be >= 1");
    std::vector<double> d1, d2;
    sp.derivatives(d1, d2);
    std::vector<HyperboloidPoint> pts;
    pts.reserve(static_cast<size_t>(sp.n_grid() * azimuths));
    for (int j = 0; j < sp.n_grid(); ++j) {
        const auto k = static_cast<size_t>(j);
        const double s = sp.s[k], ds = d1[k], es = std::exp(s), ph = sp.phi(j);
        const double half = 0.5 * es * ds * ds;
        for (int a = 0; a < azimuths; ++a) {
            const double eta = 2.0 * std::numbers::pi * a / azimuths;
            const Eigen::Vector3d z(std::sin(ph) * std::cos(eta), std::sin(ph) * std::sin(eta), std::cos(ph));
            const Eigen::Vector3d e_phi(std::cos(ph) * std::cos(eta), std::cos(ph) * std::sin(eta), -std::sin(ph));
            HyperboloidPoint p;
            p.X.head<3>() = -es * ds * e_phi + (half - std::sinh(s)) * z;
            p.X(3) = half + std::cosh(s);
            const double defect = std::abs(minkowski(p.X, p.X) + 1.0) / (p.X(3) * p.X(3));
            if (defect > 1e-8)
                throw std::logic_error("embedded support point off the hyperboloid at cell " + std::to_string(j));
            pts.push_back(p);
        }
    }
    return pts;
}

std::vector<Eigen::Matrix2d> a_matrix(const SupportProfile& sp)
{
    sp.validate();
    std::vector<double> d1, d2;
    sp.derivatives(d1, d2);
    std::vector<Eigen::Matrix2d> out(sp.s.size());
    for (int j = 0; j < sp.n_grid(); ++j) {
        const auto k = static_cast<size_t>(j);
        const double s = sp.s[k], ds = d1[k], es = std::exp(s), ph = sp.phi(j);
        const double common = -0.5 * es * ds * ds + std::sinh(s);
        out[k] << es * (d2[k] + ds * ds) + common, 0.0, 0.0,
            es * std::cos(ph) / std::sin(ph) * ds + common;
    }
    return out;
}

bool is_horoconvex(const SupportProfile& sp)
{
    for (const auto& a : a_matrix(sp))
        if (!(a(0, 0) > 0.0 && a(1, 1) > 0.0 && a.determinant() > 0.0)) return false;
    return true;
}

SupportCurvatures curvature_from_support(const SupportProfile& sp)
{
    const auto A = a_matrix(sp);
    SupportCurvatures out;
    for (int j = 0; j < sp.n_grid(); ++j) {
        const auto k = static_cast<size_t>(j);
        if (!(A[k](0, 0) > 0.0 && A[k](1, 1) > 0.0))
            throw std::domain_error("support profile is not horo-convex at cell " + std::to_string(j));
        const double e = std::exp(-sp.s[k]);
        out.kappa_meridian.push_back(e / A[k](0, 0));
        out.kappa_parallel.push_back(e / A[k](1, 1));
    }
    return out;
}

std::vector<double> support_flow_rhs(const SupportProfile& sp, const CurvatureFunction& fn, double p)
{
    if (!(p > 0.0)) throw std::invalid_argument("support_flow_rhs: p must be > 0");
    if (fn.dim() != 2) throw std::invalid_argument("support_flow_rhs: axisymmetric surfaces need n = 2");
    const CurvatureFunction fstar = fn.dual();
    const auto A = a_matrix(sp);
    std::vector<double> out;
    out.reserve(A.size());
    for (int j = 0; j < sp.n_grid(); ++j) {
        const auto k = static_cast<size_t>(j);
        if (!(A[k](0, 0) > 0.0 && A[k](1, 1) > 0.0))
            throw std::domain_error("horo-convexity lost at support cell " + std::to_string(j));
        const double fs = fstar.eval(CurvaturePoint{A[k](0, 0), A[k](1, 1)});
        out.push_back(std::exp(p * sp.s[k]) * std::pow(fs, p));
    }
    return out;
}

namespace {

struct Meridian {
    std::vector<double> angle;   // polar angle of the surface point
    std::vector<double> radius;  // geodesic distance from the origin
};

// Surface points along one meridian, as (polar angle, radius).
Meridian meridian_of(const SupportProfile& sp)
{
    const auto pts = embed_support(sp, 1);
    Meridian m;
    double sign = 0.0;
    for (const auto& p : pts) {
        const double x = p.X(0);
        if (sign == 0.0 && x != 0.0) sign = x < 0.0 ? -1.0 : 1.0;
        if (x * sign < 0.0) throw std::domain_error("embedded support surface is not a radial graph");
        m.angle.push_back(std::atan2(std::abs(x), p.X(2)));
        m.radius.push_back(std::asinh(p.X.head<3>().norm()));
    }
    for (size_t j = 1; j < m.angle.size(); ++j) {
        const double step = m.angle[j] - m.angle[j - 1];
        if (step == 0.0 || (step > 0.0) != (m.angle[1] > m.angle[0]))
            throw std::domain_error("embedded support surface is not star-shaped about the origin");
    }
    return m;
}

std::vector<double> resample(std::vector<double> angle, std::vector<double> value, int n_grid)
{
    reflect_across_poles(angle, value, 8);
    std::vector<double> out(static_cast<size_t>(n_grid));
    for (int k = 0; k < n_grid; ++k)
        out[static_cast<size_t>(k)] = lagrange_interpolate(angle, value, cell_angle(k, n_grid));
    return out;
}

}  // namespace

AxisymProfile radial_graph_from_support(const SupportProfile& sp, int n_grid)
{
    const Meridian m = meridian_of(sp);
    AxisymProfile g(resample(m.angle, m.radius, n_grid));
    g.validate();
    return g;
}

CrossCheck compare_with_graph(const SupportProfile& sp, int n_grid)
{
    CrossCheck cc;
    for (const auto& p : embed_support(sp, 1))
        cc.max_norm_defect = std::max(cc.max_norm_defect, std::abs(minkowski(p.X, p.X) + 1.0));
    const Meridian m = meridian_of(sp);
    cc.graph = AxisymProfile(resample(m.angle, m.radius, n_grid));
    cc.graph.validate();

    const SupportCurvatures sc = curvature_from_support(sp);
    const auto km = resample(m.angle, sc.kappa_meridian, n_grid);
    const auto kp = resample(m.angle, sc.kappa_parallel, n_grid);
    const AxisymCurvatures gc = axisym_curvatures(cc.graph);
    for (int k = 0; k < n_grid; ++k) {
        const auto i = static_cast<size_t>(k);
        cc.max_meridian_diff = std::max(cc.max_meridian_diff, std::abs(km[i] - gc.kappa_meridian[i]));
        cc.max_parallel_diff = std::max(cc.max_parallel_diff, std::abs(kp[i] - gc.kappa_parallel[i]));
    }
    return cc;
}

void write_support_csv(std::ostream& os, const SupportProfile& sp)
{
    os << "phi,s\n";
    os.precision(17);
    for (int j = 0; j < sp.n_grid(); ++j) os << sp.phi(j) << ',' << sp.s[static_cast<size_t>(j)] << '\n';
}

SupportProfile read_support_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty support profile file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "phi,s") throw std::invalid_argument("support profile header must be phi,s");
    std::vector<double> phi, s;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("bad support row: " + line);
        try {
            phi.push_back(std::stod(line.substr(0, comma)));
            s.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad support row: " + line);
        }
    }
    const int n = static_cast<int>(s.size());
    for (int j = 0; j < n; ++j)
        if (std::abs(phi[static_cast<size_t>(j)] - cell_angle(j, n)) > 1e-9)
            throw std::invalid_argument("support angles must be the cell centres (j+1/2)pi/n");
    SupportProfile sp(std::move(s));
    sp.validate();
    return sp;
}

}  // namespace horoflow
