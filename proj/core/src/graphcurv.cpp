#include "horoflow/graphcurv.hpp"

#include "horoflow/hypgeom.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace horoflow {

namespace {

// coth u - 1 without cancellation
double coth_minus_one(double u) { return 2.0 / std::expm1(2.0 * u); }

}  // namespace

ShiftBundle shift_weingarten(double u, const Eigen::VectorXd& grad_u, const Eigen::MatrixXd& hess_u)
{
    if (!(u > 0.0)) throw std::domain_error("shift_weingarten: u must be > 0");
    const Eigen::Index n = grad_u.size();
    if (hess_u.rows() != n || hess_u.cols() != n)
        throw std::invalid_argument("shift_weingarten: hessian shape does not match gradient");
    if ((hess_u - hess_u.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + hess_u.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("shift_weingarten: hessian must be symmetric");

    const double sh = std::sinh(u);
    const double sh2 = sh * sh;
    const double w = grad_u.squaredNorm() / sh2;  // |grad phi|^2 with phi_i = u_i / sinh u
    const double v = std::sqrt(1.0 + w);
    const Eigen::VectorXd phi = grad_u / sh;

    ShiftBundle b;
    b.v = v;
    b.g = sh2 * Eigen::MatrixXd::Identity(n, n) + grad_u * grad_u.transpose();
    const Eigen::MatrixXd ginv =
        (Eigen::MatrixXd::Identity(n, n) - phi * phi.transpose() / (v * v)) / sh2;

    // h_i^j - delta, with coth u / v - 1 split to avoid cancellation
    const double diag = coth_minus_one(u) / v - w / ((1.0 + v) * v);
    b.W_shift = diag * Eigen::MatrixXd::Identity(n, n) +
                std::cosh(u) / (v * v * v * sh2 * sh) * grad_u * grad_u.transpose() -
                hess_u * ginv / v;

    // W_shift is self-adjoint for g: solve (W g) x = kappa g x
    Eigen::MatrixXd wl = b.W_shift * b.g;
    wl = 0.5 * (wl + wl.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(wl, b.g, Eigen::EigenvaluesOnly);
    b.kappa = es.eigenvalues();
    return b;
}

CellCurvature axisym_cell(double u, double u_phi, double u_phiphi, double cot_phi)
{
    const double sh = std::sinh(u);
    const double sh2 = sh * sh;
    const double w = u_phi * u_phi / sh2;
    const double v = std::sqrt(1.0 + w);
    const double v3 = v * v * v;
    const double base = coth_minus_one(u) / v - w / ((1.0 + v) * v);
    const double coth = std::cosh(u) / sh;
    return {base + coth * w / v3 - u_phiphi / (v3 * sh2), base - cot_phi * u_phi / (v * sh2), v};
}

AxisymCurvatures axisym_curvatures(const AxisymProfile& p)
{
    p.validate();
    const int n = p.n_grid();
    std::vector<double> d1(static_cast<size_t>(n)), d2(static_cast<size_t>(n));
    axisym_derivatives(p.u, d1, d2);
    AxisymCurvatures out;
    out.kappa_meridian.resize(static_cast<size_t>(n));
    out.kappa_parallel.resize(static_cast<size_t>(n));
    out.v.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto s = static_cast<size_t>(j);
        const double ph = p.phi(j);
        const CellCurvature c = axisym_cell(p.u[s], d1[s], d2[s], std::cos(ph) / std::sin(ph));
        out.kappa_meridian[s] = c.meridian;
        out.kappa_parallel[s] = c.parallel;
        out.v[s] = c.v;
    }
    return out;
}

std::pair<double, double> embedding_oracle(const std::function<double(double)>& u, double phi,
                                           double h)
{
    auto X = [&](double ph, double eta) {
        const double r = u(ph);
        Eigen::Vector4d x;
        x << std::sinh(r) * std::sin(ph) * std::cos(eta), std::sinh(r) * std::sin(ph) * std::sin(eta),
            std::sinh(r) * std::cos(ph), std::cosh(r);
        return x;
    };
    const Eigen::Vector4d x0 = X(phi, 0.0);
    const Eigen::Vector4d xp = X(phi + h, 0.0), xm = X(phi - h, 0.0);
    const Eigen::Vector4d ep = X(phi, h), em = X(phi, -h);
    const Eigen::Vector4d x_phi = (xp - xm) / (2.0 * h);
    const Eigen::Vector4d x_eta = (ep - em) / (2.0 * h);
    const Eigen::Vector4d x_phiphi = (xp - 2.0 * x0 + xm) / (h * h);
    const Eigen::Vector4d x_etaeta = (ep - 2.0 * x0 + em) / (h * h);
    const Eigen::Vector4d x_phieta =
        (X(phi + h, h) - X(phi + h, -h) - X(phi - h, h) + X(phi - h, -h)) / (4.0 * h * h);

    // normal: Minkowski-orthogonal to x0, x_phi, x_eta
    Eigen::Matrix<double, 3, 4> rows;
    rows << x0.transpose(), x_phi.transpose(), x_eta.transpose();
    Eigen::Vector4d cross;
    for (int i = 0; i < 4; ++i) {
        Eigen::Matrix3d minor;
        int c = 0;
        for (int k = 0; k < 4; ++k)
            if (k != i) minor.col(c++) = rows.col(k);
        cross(i) = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
    }
    Eigen::Vector4d nrm = cross;
    nrm(3) = -nrm(3);  // lower the index so Euclidean orthogonality becomes Minkowski
    nrm /= std::sqrt(minkowski(nrm, nrm));
    const double r0 = u(phi);
    Eigen::Vector4d radial;
    radial << std::cosh(r0) * std::sin(phi), 0.0, std::cosh(r0) * std::cos(phi), std::sinh(r0);
    if (minkowski(nrm, radial) < 0.0) nrm = -nrm;

    Eigen::Matrix2d first, second;
    first << minkowski(x_phi, x_phi), minkowski(x_phi, x_eta), minkowski(x_phi, x_eta),
        minkowski(x_eta, x_eta);
    second << -minkowski(x_phiphi, nrm), -minkowski(x_phieta, nrm), -minkowski(x_phieta, nrm),
        -minkowski(x_etaeta, nrm);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(second, first);
    const Eigen::Vector2d lam = es.eigenvalues();
    const Eigen::Matrix2d vec = es.eigenvectors();
    // the eigenvector leaning toward d/dphi is the meridian direction
    const int mer = std::abs(vec(0, 0)) * std::sqrt(first(0, 0)) >
                            std::abs(vec(1, 0)) * std::sqrt(first(1, 1))
                        ? 0
                        : 1;
    return {lam(mer) - 1.0, lam(1 - mer) - 1.0};
}

double oscillation(const AxisymProfile& p)
{
    auto [lo, hi] = std::minmax_element(p.u.begin(), p.u.end());
    const auto [north, south] = pole_values(p.u);
    return std::max({*hi, north, south}) - std::min({*lo, north, south});
}

double gradient_bound_check(const AxisymProfile& p)
{
    const AxisymCurvatures c = axisym_curvatures(p);
    double out = 0.0;
    for (int j = 0; j < p.n_grid(); ++j) {
        const auto s = static_cast<size_t>(j);
        out = std::max(out, (c.v[s] - 1.0) * std::exp(2.0 * p.u[s]));
    }
    return out;
}

std::vector<HyperboloidPoint> surface_points(const AxisymProfile& p, int azimuths)
{
    if (azimuths < 1) throw std::invalid_argument("surface_points: azimuths must be >= 1");
    std::vector<HyperboloidPoint> pts;
    pts.reserve(static_cast<size_t>(p.n_grid() * azimuths + 2));
    for (int j = 0; j < p.n_grid(); ++j) {
        const double ph = p.phi(j);
        for (int a = 0; a < azimuths; ++a) {
            const double eta = 2.0 * std::numbers::pi * a / azimuths;
            const Eigen::Vector3d dir(std::sin(ph) * std::cos(eta), std::sin(ph) * std::sin(eta),
                                      std::cos(ph));
            pts.push_back(polar_to_hyperboloid({p.u[static_cast<size_t>(j)], dir}));
        }
    }
    const auto [north, south] = pole_values(p.u);
    pts.push_back(polar_to_hyperboloid({north, Eigen::Vector3d::UnitZ()}));
    pts.push_back(polar_to_hyperboloid({south, -Eigen::Vector3d::UnitZ()}));
    return pts;
}

void write_profile_csv(std::ostream& os, const AxisymProfile& p)
{
    const AxisymCurvatures c = axisym_curvatures(p);
    os << "phi,u,kappa_meridian,kappa_parallel,v\n";
    os.precision(17);
    for (int j = 0; j < p.n_grid(); ++j) {
        const auto s = static_cast<size_t>(j);
        os << p.phi(j) << ',' << p.u[s] << ',' << c.kappa_meridian[s] << ',' << c.kappa_parallel[s]
           << ',' << c.v[s] << '\n';
    }
}

AxisymProfile read_profile_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty profile file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("phi,u", 0) != 0) throw std::invalid_argument("profile header must start with phi,u");
    std::vector<double> phi, u;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        try {
            phi.push_back(std::stod(a));
            u.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad profile row: " + line);
        }
    }
    const int n = static_cast<int>(u.size());
    for (int j = 0; j < n; ++j)
        if (std::abs(phi[static_cast<size_t>(j)] - cell_angle(j, n)) > 1e-9)
            throw std::invalid_argument("profile angles must be the cell centres (j+1/2)pi/n");
    AxisymProfile p(std::move(u));
    p.validate();
    return p;
}

}  // namespace horoflow
