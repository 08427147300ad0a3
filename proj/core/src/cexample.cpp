#include "horoflow/cexample.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace horoflow {

void QuarticParams::validate() const
{
    for (double x : {a2, b2, c3})
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("quartic parameters a2, b2, c3 must be positive");
}

namespace {

struct Monomial {
    double coef;
    int e1, e2;
};

std::array<Monomial, 5> monomials(const QuarticParams& q)
{
    return {{{QuarticParams::c1() / 24.0, 4, 0},
             {0.5 * q.a2, 0, 2},
             {0.5 * q.b2, 1, 2},
             {0.25 * q.c2(), 2, 2},
             {q.c3, 0, 0}}};
}

double falling(int e, int k)
{
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= e - i;
    return out;
}

double ipow(double x, int e)
{
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= x;
    return out;
}

// d^{k1+k2} u / dx1^k1 dx2^k2
double partial(const std::array<Monomial, 5>& ms, double x1, double x2, int k1, int k2)
{
    double s = 0.0;
    for (const auto& m : ms) {
        if (k1 > m.e1 || k2 > m.e2) continue;
        s += m.coef * falling(m.e1, k1) * falling(m.e2, k2) * ipow(x1, m.e1 - k1) * ipow(x2, m.e2 - k2);
    }
    return s;
}

}  // namespace

QuarticJet u_breve(const QuarticParams& q, double x1, double x2, int order)
{
    if (order < 0 || order > 4) throw std::invalid_argument("u_breve: order must lie in [0, 4]");
    const auto ms = monomials(q);
    QuarticJet jet;
    jet.value = partial(ms, x1, x2, 0, 0);
    auto count = [](std::initializer_list<int> idx, int which) {
        int c = 0;
        for (int i : idx) c += i == which;
        return c;
    };
    if (order >= 1)
        for (int i = 0; i < 2; ++i) jet.grad(i) = partial(ms, x1, x2, count({i}, 0), count({i}, 1));
    if (order >= 2)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) jet.hess(i, j) = partial(ms, x1, x2, count({i, j}, 0), count({i, j}, 1));
    if (order >= 3)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    jet.third[static_cast<size_t>((i * 2 + j) * 2 + k)] =
                        partial(ms, x1, x2, count({i, j, k}, 0), count({i, j, k}, 1));
    if (order >= 4)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        jet.fourth[static_cast<size_t>(((i * 2 + j) * 2 + k) * 2 + l)] =
                            partial(ms, x1, x2, count({i, j, k, l}, 0), count({i, j, k, l}, 1));
    return jet;
}

namespace {

struct Forms {
    double v;
    Eigen::Matrix2d g, h;
};

Forms forms_at(const QuarticParams& q, double x1, double x2)
{
    const QuarticJet j = u_breve(q, x1, x2, 2);
    if (!(j.value > 0.0)) throw std::domain_error("graph leaves the upper half-space");
    const double u = j.value;
    const Eigen::Matrix2d dd = j.grad * j.grad.transpose() + Eigen::Matrix2d::Identity();
    Forms f;
    f.v = std::sqrt(1.0 + j.grad.squaredNorm());
    f.g = dd / (u * u);
    f.h = j.hess / (f.v * u) + dd / (f.v * u * u);
    return f;
}

}  // namespace

ShiftBundle halfspace_shift_weingarten(const QuarticParams& q, double x1, double x2)
{
    q.validate();
    const Forms f = forms_at(q, x1, x2);
    const Eigen::Matrix2d hs = f.h - f.g;
    ShiftBundle b;
    b.v = f.v;
    b.g = f.g;
    b.W_shift = hs * f.g.inverse();  // row i, column j: h_i^j - delta
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(hs, f.g, Eigen::EigenvaluesOnly);
    b.kappa = es.eigenvalues();
    return b;
}

Eigen::Matrix2d halfspace_shifted_form(const QuarticParams& q, double x1, double x2)
{
    q.validate();
    const Forms f = forms_at(q, x1, x2);
    return f.h - f.g;
}

OriginJet origin_jet(const QuarticParams& q)
{
    q.validate();
    const QuarticJet u = u_breve(q, 0.0, 0.0, 4);
    const double c3 = u.value;
    auto d2 = [&](int i, int j) { return u.hess(i, j); };
    auto kd = [](int i, int j) { return i == j ? 1.0 : 0.0; };

    OriginJet o;
    o.g = Eigen::Matrix2d::Identity() / (c3 * c3);
    o.h = u.hess / c3 + Eigen::Matrix2d::Identity() / (c3 * c3);
    o.h_shift = o.h - o.g;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) o.dh[static_cast<size_t>((k * 2 + i) * 2 + j)] = u.d3(i, j, k) / c3;

    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double first = u.d4(i, j, k, l), second = 0.0;
                    for (int m = 0; m < 2; ++m) {
                        first -= d2(k, i) * d2(j, m) * d2(m, l) + d2(k, j) * d2(i, m) * d2(m, l) +
                                 d2(i, j) * d2(k, m) * d2(m, l);
                        second -= d2(m, k) * d2(m, l) * kd(i, j) + d2(l, m) * d2(m, j) * kd(i, k) +
                                  d2(l, m) * d2(i, m) * kd(j, k);
                    }
                    second += d2(k, l) * d2(i, j) + d2(k, j) * d2(i, l) + d2(l, j) * d2(i, k);
                    o.ddh[static_cast<size_t>(((l * 2 + k) * 2 + i) * 2 + j)] = first / c3 + second / (c3 * c3);
                }
    return o;
}

RateReport dh11_rate(const QuarticParams& q, double p)
{
    if (!(q.a2 != 0.0)) throw std::invalid_argument("dh11_rate: a2 must be nonzero");
    q.validate();
    if (!(p > 0.0)) throw std::invalid_argument("dh11_rate: p must be > 0");
    RateReport r;
    r.closed_form = p / (std::pow(q.c3, p) * std::pow(q.a2, p + 2.0)) * (0.5 * q.a2 + (1.0 - p) * q.b2 * q.b2);

    // evolution of h_shift_ij with speed Phi = -H_shift^{-p}, evaluated at i = j = 1
    const OriginJet o = origin_jet(q);
    const Eigen::Matrix2d ginv = o.g.inverse();
    const double H = (ginv.cwiseProduct(o.h_shift)).sum();
    r.shifted_mean = H;
    const double phi = -std::pow(H, -p);
    const Eigen::Matrix2d dphi = p * std::pow(H, -p - 1.0) * ginv;  // dPhi / dh_kl
    const double ddphi = -p * (p + 1.0) * std::pow(H, -p - 2.0);     // times g^kl g^rs
    const Eigen::Matrix2d sq = o.h_shift * ginv * o.h_shift;          // (h_shift^2)_ij

    const int i = 0, j = 0;
    double diffusion = 0.0, gradient_i = 0.0, gradient_j = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            diffusion += dphi(k, l) * o.nabla2(k, l, i, j);
            gradient_i += ginv(k, l) * o.nabla(i, k, l);
            gradient_j += ginv(k, l) * o.nabla(j, k, l);
        }
    const double dphi_sq = dphi.cwiseProduct(sq).sum();
    const double dphi_g = dphi.cwiseProduct(o.g).sum();
    r.assembled = diffusion + ddphi * gradient_i * gradient_j + dphi_sq * (o.h_shift(i, j) + o.g(i, j)) +
                  ((p - 1.0) * phi - dphi_g) * sq(i, j);
    return r;
}

double sign_threshold(const QuarticParams& q)
{
    q.validate();
    return 1.0 + q.a2 / (2.0 * q.b2 * q.b2);
}

WindowReport horoconvexity_window(const QuarticParams& q, double r, int grid)
{
    q.validate();
    if (!(r > 0.0)) throw std::invalid_argument("horoconvexity_window: r must be > 0");
    if (r > 0.1) throw std::invalid_argument("horoconvexity_window: patch radius above 0.1 leaves the local expansion");
    if (grid < 5) throw std::invalid_argument("horoconvexity_window: grid must be >= 5");

    WindowReport w;
    w.min_excess = std::numeric_limits<double>::infinity();
    w.origin_excess = halfspace_shift_weingarten(q, 0.0, 0.0).kappa.minCoeff();
    std::vector<std::array<double, 3>> pts;  // x1, x2, lambda_1(h_euclid u v)
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            const double x1 = -r + 2.0 * r * a / (grid - 1), x2 = -r + 2.0 * r * b / (grid - 1);
            if (x1 * x1 + x2 * x2 > r * r * (1.0 + 1e-12)) continue;
            const ShiftBundle sb = halfspace_shift_weingarten(q, x1, x2);
            const double kmin = sb.kappa.minCoeff();
            if (x1 != 0.0 || x2 != 0.0) {
                if (kmin < w.min_excess) {
                    w.min_excess = kmin;
                    w.min_location = {x1, x2};
                }
            }
            // h_i^j = h_euclid_i^j u + delta / v, so lambda_1(h_euclid u v) = v lambda_min - 1
            pts.push_back({x1, x2, sb.v * (kmin + 1.0) - 1.0});
        }
    w.samples = static_cast<int>(pts.size());

    const int cols = 12;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
    for (size_t s = 0; s < pts.size(); ++s) {
        const double x1 = pts[s][0] / r, x2 = pts[s][1] / r;  // scaled for conditioning
        int c = 0;
        for (int deg = 2; deg <= 4; ++deg)
            for (int e1 = deg; e1 >= 0; --e1) A(static_cast<Eigen::Index>(s), c++) = ipow(x1, e1) * ipow(x2, deg - e1);
        y(static_cast<Eigen::Index>(s)) = pts[s][2];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    w.coeff_x1x1 = coef(0) / (r * r);
    w.coeff_x1x2 = coef(1) / (r * r);
    w.coeff_x2x2 = coef(2) / (r * r);
    return w;
}

double far_field_lower_bound(double beta, double c3, double v)
{
    if (!(v >= 1.0)) throw std::invalid_argument("far_field_lower_bound: v must be >= 1");
    return beta * c3 + 1.0 / v;
}

std::string counterexample_json(const QuarticParams& q, double p, double r, int grid)
{
    const RateReport rate = dh11_rate(q, p);
    const WindowReport w = horoconvexity_window(q, r, grid);
    nlohmann::json j;
    j["params"] = {{"a2", q.a2}, {"b2", q.b2}, {"c3", q.c3}, {"c1", QuarticParams::c1()}, {"c2", q.c2()}, {"p", p}};
    j["rate_closed"] = rate.closed_form;
    j["rate_assembled"] = rate.assembled;
    j["rate_difference"] = std::abs(rate.closed_form - rate.assembled);
    j["horoconvex_min"] = w.min_excess;
    j["horoconvex_min_at"] = {w.min_location(0), w.min_location(1)};
    j["horoconvex_origin"] = w.origin_excess;
    j["horoconvex"] = w.horoconvex();
    j["window_radius"] = r;
    j["quad_coeffs"] = {w.coeff_x1x1, w.coeff_x2x2};
    j["quad_coeffs_expected"] = {q.c3 / 8.0, q.c3 / 8.0};
    j["quad_cross_coeff"] = w.coeff_x1x2;
    j["local_window_condition"] = q.c3 > 4.0 * q.a2 * q.a2;
    const double threshold = sign_threshold(q);
    j["sign_prediction"] = {{"threshold_p", threshold},
                            {"rate_negative", p > threshold},
                            {"rate_sign", rate.closed_form < 0.0 ? -1 : (rate.closed_form > 0.0 ? 1 : 0)}};
    return j.dump(2);
}

}  // namespace horoflow
