#include "horoflow/curvfun.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace horoflow {

CurvaturePoint::CurvaturePoint(std::initializer_list<double> k)
    : kappa(static_cast<Eigen::Index>(k.size()))
{
    Eigen::Index i = 0;
    for (double x : k) kappa(i++) = x;
}

Eigen::VectorXd elementary_symmetric(const Eigen::VectorXd& z)
{
    const Eigen::Index m = z.size();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m + 1);
    e(0) = 1.0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j >= 1; --j) e(j) += z(i) * e(j - 1);
    return e;
}

namespace {

double binomial(int n, int k)
{
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

Eigen::VectorXd without(const Eigen::VectorXd& z, int a, int b = -1)
{
    Eigen::VectorXd out(z.size() - (b >= 0 ? 2 : 1));
    Eigen::Index m = 0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (i != a && i != b) out(m++) = z(i);
    return out;
}

// Normalized E_k = e_k / C(n,k) with its gradient and Hessian.
void normalized_esf(const Eigen::VectorXd& z, int k, double& val, Eigen::VectorXd& grad,
                    Eigen::MatrixXd& hess)
{
    const int n = static_cast<int>(z.size());
    const double scale = 1.0 / binomial(n, k);
    val = elementary_symmetric(z)(k) * scale;
    grad = Eigen::VectorXd::Zero(n);
    hess = Eigen::MatrixXd::Zero(n, n);
    if (k == 0) return;
    for (int i = 0; i < n; ++i) grad(i) = elementary_symmetric(without(z, i))(k - 1) * scale;
    if (k == 1) return;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            hess(i, j) = hess(j, i) = elementary_symmetric(without(z, i, j))(k - 2) * scale;
}

std::string format_real(double r)
{
    std::ostringstream os;
    os << r;
    return os.str();
}

double parse_real(std::string_view s, std::string_view full)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("bad number in curvature function id: " + std::string(full));
    return v;
}

int parse_int(std::string_view s, std::string_view full)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("bad integer in curvature function id: " + std::string(full));
    return v;
}

void require_dim(int n)
{
    if (n < 2) throw std::invalid_argument("curvature function dimension must be >= 2");
}

}  // namespace

// ---- construction ---------------------------------------------------------

CurvatureFunction CurvatureFunction::shifted_mean(int n)
{
    require_dim(n);
    CurvatureFunction f;
    f.kind_ = Kind::ShiftedMean;
    f.n_ = n;
    f.flags_ = {true, true, false, true};
    f.id_ = "shifted-mean";
    f.c_ = n / f.raw_eval(Eigen::VectorXd::Ones(n));
    return f;
}

CurvatureFunction CurvatureFunction::ek_root(int n, int k)
{
    require_dim(n);
    if (k < 1 || k > n) throw std::invalid_argument("ek-root requires 1 <= k <= n");
    CurvatureFunction f;
    f.kind_ = Kind::ElementaryRoot;
    f.n_ = n;
    f.k_ = k;
    f.flags_ = {true, true, k == n, true};
    f.id_ = k == n ? "gauss-root" : "ek-root:k=" + std::to_string(k);
    f.c_ = n / f.raw_eval(Eigen::VectorXd::Ones(n));
    return f;
}

CurvatureFunction CurvatureFunction::power_mean(int n, double r)
{
    require_dim(n);
    if (r == 0.0 || !std::isfinite(r)) throw std::invalid_argument("power-mean requires finite r != 0");
    CurvatureFunction f;
    f.kind_ = Kind::PowerMean;
    f.n_ = n;
    f.r_ = r;
    f.flags_ = {r <= 1.0, r >= -1.0, r < 0.0, r > 0.0};
    f.id_ = "power-mean:r=" + format_real(r);
    f.c_ = n / f.raw_eval(Eigen::VectorXd::Ones(n));
    return f;
}

CurvatureFunction CurvatureFunction::quotient(int n, int k, int l)
{
    require_dim(n);
    if (!(0 <= l && l < k && k <= n)) throw std::invalid_argument("quotient requires 0 <= l < k <= n");
    CurvatureFunction f;
    f.kind_ = Kind::Quotient;
    f.n_ = n;
    f.k_ = k;
    f.l_ = l;
    f.flags_ = {true, true, k == n, l == 0};
    f.id_ = "quotient:k=" + std::to_string(k) + ",l=" + std::to_string(l);
    f.c_ = n / f.raw_eval(Eigen::VectorXd::Ones(n));
    return f;
}

CurvatureFunction CurvatureFunction::from_id(std::string_view id, int n)
{
    constexpr std::string_view dual_prefix = "dual:";
    if (id.substr(0, dual_prefix.size()) == dual_prefix)
        return from_id(id.substr(dual_prefix.size()), n).dual();

    const auto colon = id.find(':');
    const std::string_view name = id.substr(0, colon);
    const std::string_view args = colon == std::string_view::npos ? "" : id.substr(colon + 1);

    // key=value pairs separated by commas
    auto arg = [&](std::string_view key) -> std::string_view {
        std::string_view rest = args;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            std::string_view item = rest.substr(0, comma);
            const auto eq = item.find('=');
            if (eq != std::string_view::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        throw std::invalid_argument("missing parameter '" + std::string(key) + "' in " + std::string(id));
    };

    if (name == "shifted-mean" && args.empty()) return shifted_mean(n);
    if (name == "gauss-root" && args.empty()) return gauss_root(n);
    if (name == "ek-root") return ek_root(n, parse_int(arg("k"), id));
    if (name == "power-mean") return power_mean(n, parse_real(arg("r"), id));
    if (name == "quotient") return quotient(n, parse_int(arg("k"), id), parse_int(arg("l"), id));
    throw std::invalid_argument("unknown curvature function id: " + std::string(id));
}

std::vector<std::string> CurvatureFunction::catalog_ids(int n)
{
    std::vector<std::string> ids{"shifted-mean"};
    for (int k = 1; k <= n; ++k) ids.push_back(ek_root(n, k).id());
    for (double r : {-1.0, 0.5, 2.0}) ids.push_back(power_mean(n, r).id());
    if (n >= 3) ids.push_back("quotient:k=2,l=1");
    return ids;
}

CurvatureFunction CurvatureFunction::dual() const
{
    CurvatureFunction d = *this;
    d.dual_ = !dual_;
    d.flags_ = {flags_.inverse_concave, flags_.concave, flags_.fstar_vanishes_on_boundary,
                flags_.f_vanishes_on_boundary};
    d.id_ = dual_ ? id_.substr(5) : "dual:" + id_;
    return d;
}

double CurvatureFunction::value_at_ones() const
{
    return dual_ ? 1.0 / n_ : static_cast<double>(n_);
}

bool CurvatureFunction::extends_off_cone() const
{
    return !dual_ && (kind_ == Kind::ShiftedMean || (kind_ == Kind::ElementaryRoot && k_ == 1));
}

// ---- raw expressions ------------------------------------------------------

double CurvatureFunction::raw_eval(const Eigen::VectorXd& k) const
{
    switch (kind_) {
    case Kind::ShiftedMean:
        return k.sum();
    case Kind::ElementaryRoot: {
        const double e = elementary_symmetric(k)(k_) / binomial(n_, k_);
        return k_ == 1 ? e : std::pow(e, 1.0 / k_);
    }
    case Kind::PowerMean: {
        if (r_ < 0.0 && (k.array() <= 0.0).any())
            throw std::domain_error(id_ + " is undefined on the cone boundary");
        const double m = k.array().pow(r_).mean();
        return std::pow(m, 1.0 / r_);
    }
    case Kind::Quotient: {
        const Eigen::VectorXd e = elementary_symmetric(k);
        const double ek = e(k_) / binomial(n_, k_);
        const double el = e(l_) / binomial(n_, l_);
        if (el <= 0.0) throw std::domain_error(id_ + " is undefined where E_l vanishes");
        return std::pow(ek / el, 1.0 / (k_ - l_));
    }
    }
    return 0.0;
}

void CurvatureFunction::raw_derivatives(const Eigen::VectorXd& k, double& f, Eigen::VectorXd& g,
                                        Eigen::MatrixXd& h) const
{
    const int n = n_;
    switch (kind_) {
    case Kind::ShiftedMean:
        f = k.sum();
        g = Eigen::VectorXd::Ones(n);
        h = Eigen::MatrixXd::Zero(n, n);
        return;
    case Kind::ElementaryRoot: {
        double e;
        Eigen::VectorXd de;
        Eigen::MatrixXd dde;
        normalized_esf(k, k_, e, de, dde);
        const double inv = 1.0 / k_;
        f = std::pow(e, inv);
        const Eigen::VectorXd a = de / e;
        g = f * inv * a;
        h = f * (inv * (inv - 1.0) * a * a.transpose() + inv * dde / e);
        return;
    }
    case Kind::PowerMean: {
        const Eigen::ArrayXd kr = k.array().pow(r_);
        const double s = kr.sum();
        f = std::pow(s / n, 1.0 / r_);
        const Eigen::ArrayXd w = kr / s;
        g = (f * w / k.array()).matrix();
        h = Eigen::MatrixXd(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                h(i, j) = f * (1.0 - r_) * (w(i) * w(j) - (i == j ? w(i) : 0.0)) / (k(i) * k(j));
        return;
    }
    case Kind::Quotient: {
        double ek, el;
        Eigen::VectorXd dek, del;
        Eigen::MatrixXd ddek, ddel;
        normalized_esf(k, k_, ek, dek, ddek);
        normalized_esf(k, l_, el, del, ddel);
        const double m = static_cast<double>(k_ - l_);
        f = std::pow(ek / el, 1.0 / m);
        const Eigen::VectorXd ak = dek / ek;
        const Eigen::VectorXd al = del / el;
        const Eigen::VectorXd a = (ak - al) / m;
        const Eigen::MatrixXd da =
            (ddek / ek - ak * ak.transpose() - ddel / el + al * al.transpose()) / m;
        g = f * a;
        h = f * (a * a.transpose() + da);
        return;
    }
    }
}

// ---- public evaluation ----------------------------------------------------

void CurvatureFunction::check_point(const CurvaturePoint& k, bool open) const
{
    if (k.dim() != n_)
        throw std::invalid_argument("dimension mismatch: " + id_ + " has n=" + std::to_string(n_) +
                                    ", point has " + std::to_string(k.dim()));
    if (!k.kappa.allFinite()) throw std::domain_error("non-finite curvature point");
    if (extends_off_cone()) return;
    if (open ? !k.in_open_cone() : !k.in_closed_cone())
        throw std::domain_error(id_ + ": point outside the " + (open ? "open" : "closed") +
                                " positive cone");
}

double CurvatureFunction::eval(const CurvaturePoint& k) const
{
    check_point(k, false);
    if (!dual_) return c_ * raw_eval(k.kappa);
    if (!k.in_open_cone()) throw std::domain_error(id_ + " is undefined on the cone boundary");
    return 1.0 / (c_ * raw_eval(k.kappa.cwiseInverse()));
}

DerivativeBundle CurvatureFunction::derivatives(const CurvaturePoint& k) const
{
    check_point(k, true);
    DerivativeBundle d;
    d.at = k;
    if (!dual_) {
        raw_derivatives(k.kappa, d.value, d.grad, d.hess);
        d.value *= c_;
        d.grad *= c_;
        d.hess *= c_;
        return d;
    }

    // f_*(kappa) = 1/F(y), y = 1/kappa
    const Eigen::VectorXd y = k.kappa.cwiseInverse();
    double fy;
    Eigen::VectorXd gy;
    Eigen::MatrixXd hy;
    raw_derivatives(y, fy, gy, hy);
    fy *= c_;
    gy *= c_;
    hy *= c_;

    const Eigen::ArrayXd k2 = k.kappa.array().square();
    const Eigen::VectorXd w = (gy.array() / k2).matrix();
    d.value = 1.0 / fy;
    d.grad = w / (fy * fy);
    d.hess = 2.0 / (fy * fy * fy) * w * w.transpose();
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) d.hess(i, j) -= hy(i, j) / (k2(i) * k2(j) * fy * fy);
        d.hess(i, i) -= 2.0 * gy(i) / (k2(i) * k.kappa(i) * fy * fy);
    }
    return d;
}

double CurvatureFunction::tie_limit(const DerivativeBundle& d, int i, int k) const
{
    // symmetric f: fdot_i - fdot_k ~ (fddot_ii - fddot_ik)(kappa_i - kappa_k)
    return 0.5 * (d.hess(i, i) + d.hess(k, k)) - d.hess(i, k);
}

double matrix_second_derivative(const CurvatureFunction& fn, const CurvaturePoint& k,
                                const Eigen::MatrixXd& B, double tie_tol)
{
    const int n = k.dim();
    if (B.rows() != n || B.cols() != n) throw std::invalid_argument("B has the wrong shape");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + B.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("B must be symmetric");

    const DerivativeBundle d = fn.derivatives(k);
    const Eigen::VectorXd diag = B.diagonal();
    double out = diag.dot(d.hess * diag);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            const double gap = k.kappa(i) - k.kappa(j);
            const double q = std::abs(gap) < tie_tol ? fn.tie_limit(d, i, j)
                                                     : (d.grad(i) - d.grad(j)) / gap;
            out += 2.0 * q * B(i, j) * B(i, j);
        }
    }
    return out;
}

}  // namespace horoflow
