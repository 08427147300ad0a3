#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace horoflow {

/// Shifted principal curvatures kappa_i = lambda_i - 1.
struct CurvaturePoint {
    Eigen::VectorXd kappa;

    CurvaturePoint() = default;
    explicit CurvaturePoint(Eigen::VectorXd k) : kappa(std::move(k)) {}
    CurvaturePoint(std::initializer_list<double> k);

    [[nodiscard]] int dim() const { return static_cast<int>(kappa.size()); }
    [[nodiscard]] bool in_open_cone() const { return (kappa.array() > 0.0).all(); }
    [[nodiscard]] bool in_closed_cone() const { return (kappa.array() >= 0.0).all(); }
    /// Unshifted principal curvatures lambda = kappa + 1.
    [[nodiscard]] Eigen::VectorXd lambda() const { return kappa.array() + 1.0; }
};

struct StructureFlags {
    bool concave = false;
    bool inverse_concave = false;
    bool f_vanishes_on_boundary = false;
    bool fstar_vanishes_on_boundary = false;
};

struct DerivativeBundle {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    CurvaturePoint at;
};

/// A catalog curvature function: symmetric, 1-homogeneous, increasing,
/// normalized so that f(1,...,1) = n. Duals are stored as a flag on the
/// same entry, so dual(dual(f)) reproduces f exactly.
class CurvatureFunction {
public:
    enum class Kind { ShiftedMean, ElementaryRoot, PowerMean, Quotient };

    static CurvatureFunction shifted_mean(int n);
    /// n * E_k^{1/k} with E_k the normalized elementary symmetric polynomial.
    static CurvatureFunction ek_root(int n, int k);
    static CurvatureFunction gauss_root(int n) { return ek_root(n, n); }
    /// n * (mean of kappa_i^r)^{1/r}, r != 0.
    static CurvatureFunction power_mean(int n, double r);
    /// n * (E_k / E_l)^{1/(k-l)}, k > l.
    static CurvatureFunction quotient(int n, int k, int l);

    /// Parses ids like "shifted-mean", "gauss-root", "ek-root:k=2",
    /// "power-mean:r=-1", "quotient:k=2,l=1", optionally prefixed "dual:".
    static CurvatureFunction from_id(std::string_view id, int n);
    /// Ids of the base catalog valid in dimension n.
    static std::vector<std::string> catalog_ids(int n);

    [[nodiscard]] const std::string& id() const { return id_; }
    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_dual() const { return dual_; }
    [[nodiscard]] const StructureFlags& flags() const { return flags_; }
    /// Multiplicative constant applied to the raw expression.
    [[nodiscard]] double normalization() const { return c_; }
    /// f(1,...,1); equals n for base entries and 1/n for duals.
    [[nodiscard]] double value_at_ones() const;
    /// Linear entries are defined on all of R^n.
    [[nodiscard]] bool extends_off_cone() const;

    [[nodiscard]] double eval(const CurvaturePoint& k) const;
    [[nodiscard]] DerivativeBundle derivatives(const CurvaturePoint& k) const;
    /// Limit of (fdot_i - fdot_k)/(kappa_i - kappa_k) as the two entries merge,
    /// evaluated from the analytic Hessian.
    [[nodiscard]] double tie_limit(const DerivativeBundle& d, int i, int k) const;
    [[nodiscard]] CurvatureFunction dual() const;

private:
    CurvatureFunction() = default;

    double raw_eval(const Eigen::VectorXd& k) const;
    void raw_derivatives(const Eigen::VectorXd& k, double& f, Eigen::VectorXd& g,
                         Eigen::MatrixXd& h) const;
    void check_point(const CurvaturePoint& k, bool open) const;

    Kind kind_ = Kind::ShiftedMean;
    int n_ = 2;
    int k_ = 1;
    int l_ = 0;
    double r_ = 1.0;
    double c_ = 1.0;
    bool dual_ = false;
    StructureFlags flags_{};
    std::string id_;
};

[[nodiscard]] inline double eval(const CurvatureFunction& fn, const CurvaturePoint& k)
{
    return fn.eval(k);
}
[[nodiscard]] inline DerivativeBundle derivatives(const CurvatureFunction& fn,
                                                  const CurvaturePoint& k)
{
    return fn.derivatives(k);
}
[[nodiscard]] inline CurvatureFunction dual(const CurvatureFunction& fn) { return fn.dual(); }

inline constexpr double kDefaultTieTolerance = 1e-9;

/// Second derivative of F(A) = f(eig A) at A = diag(kappa) in direction B.
[[nodiscard]] double matrix_second_derivative(const CurvatureFunction& fn,
                                              const CurvaturePoint& k,
                                              const Eigen::MatrixXd& B,
                                              double tie_tol = kDefaultTieTolerance);

/// Elementary symmetric polynomials e_0..e_m of z.
[[nodiscard]] Eigen::VectorXd elementary_symmetric(const Eigen::VectorXd& z);

// ---- certification -------------------------------------------------------

struct CertificationCheck {
    std::string name;
    bool passed = true;
    double worst_violation = 0.0;
    std::vector<double> witness;  // empty when no sample attained the worst value
};

struct CertificationReport {
    std::string id;
    int n = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<CertificationCheck> checks;

    [[nodiscard]] bool all_passed() const;
    [[nodiscard]] std::string to_json(int indent = 2) const;
};

inline constexpr double kCertificationTolerance = 1e-8;

[[nodiscard]] CertificationReport certify_structure(const CurvatureFunction& fn,
                                                    int sample_count,
                                                    std::uint64_t seed);

}  // namespace horoflow
