#include "horoflow/curvfun.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <random>

using namespace horoflow;

namespace {

std::vector<CurvatureFunction> catalog(int n)
{
    std::vector<CurvatureFunction> out;
    for (const auto& id : CurvatureFunction::catalog_ids(n)) {
        out.push_back(CurvatureFunction::from_id(id, n));
        out.push_back(out.back().dual());
    }
    return out;
}

// F(A) = f(eigenvalues of A) for symmetric A
double matrix_function(const CurvatureFunction& fn, const Eigen::MatrixXd& A)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    return fn.eval(CurvaturePoint(es.eigenvalues()));
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) B(i, j) = B(j, i) = g(rng);
    return B;
}

}  // namespace

TEST_CASE("eval on the spec examples")
{
    const auto mean = CurvatureFunction::shifted_mean(2);
    CHECK(mean.eval({1.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-15));

    const auto gauss = CurvatureFunction::gauss_root(2);
    CHECK(gauss.eval({4.0, 1.0}) == doctest::Approx(2.0 * std::sqrt(4.0)).epsilon(1e-14));

    // harmonic mean n^2 / sum(1/kappa)
    const auto harmonic = CurvatureFunction::from_id("power-mean:r=-1", 2);
    CHECK(harmonic.eval({1.0, 2.0}) == doctest::Approx(4.0 / (1.0 + 0.5)).epsilon(1e-14));
}

TEST_CASE("every catalog entry is normalized to n at the diagonal")
{
    for (int n : {2, 3, 4})
        for (const auto& id : CurvatureFunction::catalog_ids(n)) {
            const auto f = CurvatureFunction::from_id(id, n);
            CAPTURE(id);
            CHECK(f.eval(CurvaturePoint(Eigen::VectorXd::Ones(n))) == doctest::Approx(n).epsilon(1e-14));
            CHECK(f.dual().eval(CurvaturePoint(Eigen::VectorXd::Ones(n))) ==
                  doctest::Approx(1.0 / n).epsilon(1e-14));
        }
}

TEST_CASE("eval rejects bad inputs")
{
    const auto mean = CurvatureFunction::shifted_mean(2);
    CHECK_THROWS_AS((void)mean.eval({1.0, 2.0, 3.0}), std::invalid_argument);
    const auto harmonic = CurvatureFunction::from_id("power-mean:r=-1", 2);
    CHECK_THROWS_AS((void)harmonic.eval({0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS((void)harmonic.eval({-1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS((void)CurvatureFunction::gauss_root(2).eval({-1.0, 1.0}), std::domain_error);
    // the linear entry extends past the cone
    CHECK(mean.extends_off_cone());
    CHECK(mean.eval({-1.0, 1.0}) == 0.0);
    // the boundary is fine where the expression is defined
    CHECK(CurvatureFunction::gauss_root(2).eval({0.0, 3.0}) == 0.0);
}

TEST_CASE("id parsing")
{
    CHECK(CurvatureFunction::from_id("ek-root:k=2", 2).id() == "gauss-root");
    CHECK(CurvatureFunction::from_id("ek-root:k=1", 3).id() == "ek-root:k=1");
    CHECK(CurvatureFunction::from_id("dual:power-mean:r=-1", 2).id() == "dual:power-mean:r=-1");
    CHECK(CurvatureFunction::from_id("quotient:k=2,l=1", 3).kind() == CurvatureFunction::Kind::Quotient);
    CHECK_THROWS_AS((void)CurvatureFunction::from_id("power-mean:r=0", 2), std::invalid_argument);
    CHECK_THROWS_AS((void)CurvatureFunction::from_id("ek-root:k=3", 2), std::invalid_argument);
    CHECK_THROWS_AS((void)CurvatureFunction::from_id("nonsense", 2), std::invalid_argument);
    CHECK_THROWS_AS((void)CurvatureFunction::from_id("power-mean", 2), std::invalid_argument);
    CHECK_THROWS_AS((void)CurvatureFunction::shifted_mean(1), std::invalid_argument);
}

TEST_CASE("derivatives of the shifted mean and Gauss root")
{
    std::mt19937_64 rng(11);
    const auto mean = CurvatureFunction::shifted_mean(3);
    for (int s = 0; s < 20; ++s) {
        const auto d = mean.derivatives(CurvaturePoint(oracle::log_uniform(rng, 3)));
        CHECK((d.grad.array() - 1.0).abs().maxCoeff() < 1e-15);
        CHECK(d.hess.cwiseAbs().maxCoeff() == 0.0);
    }
    // symmetry and Euler at the diagonal force each partial to f/n = 1
    const auto g = CurvatureFunction::gauss_root(2).derivatives({1.0, 1.0});
    CHECK(g.grad(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.grad(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)CurvatureFunction::gauss_root(2).derivatives({0.0, 1.0}), std::domain_error);
}

TEST_CASE("analytic gradient and hessian match central differences")
{
    std::mt19937_64 rng(2024);
    for (int n : {2, 3}) {
        for (const auto& fn : catalog(n)) {
            CAPTURE(fn.id());
            for (int s = 0; s < 10; ++s) {
                const Eigen::VectorXd k = oracle::log_uniform(rng, n, 0.2, 5.0);
                const auto d = fn.derivatives(CurvaturePoint(k));
                for (int i = 0; i < n; ++i) {
                    auto along = [&](double x) {
                        Eigen::VectorXd y = k;
                        y(i) = x;
                        return fn.eval(CurvaturePoint(y));
                    };
                    const double fd = oracle::d1(along, k(i), 1e-5 * k(i));
                    CHECK(std::abs(d.grad(i) - fd) <= 1e-6 * std::max(std::abs(fd), 1e-3));
                    auto grad_i = [&](double x) {
                        Eigen::VectorXd y = k;
                        y(i) = x;
                        return fn.derivatives(CurvaturePoint(y)).grad;
                    };
                    const double h = 1e-5 * k(i);
                    const Eigen::VectorXd col = (grad_i(k(i) + h) - grad_i(k(i) - h)) / (2.0 * h);
                    CHECK((d.hess.col(i) - col).cwiseAbs().maxCoeff() <=
                          1e-5 * std::max(1.0, d.hess.cwiseAbs().maxCoeff()));
                }
            }
        }
    }
}

TEST_CASE("permutation symmetry, homogeneity and the Euler identity")
{
    std::mt19937_64 rng(7);
    for (int n : {2, 3, 4}) {
        for (const auto& fn : catalog(n)) {
            CAPTURE(fn.id());
            double worst_perm = 0, worst_hom = 0, worst_euler = 0;
            for (int s = 0; s < 1000; ++s) {
                Eigen::VectorXd k = oracle::log_uniform(rng, n, 1e-3, 1e3);
                const double f = fn.eval(CurvaturePoint(k));
                const Eigen::VectorXd perm = k.reverse();
                worst_perm = std::max(worst_perm, std::abs(fn.eval(CurvaturePoint(perm)) - f) / f);
                for (double scale : {1e-3, 1.0, 1e3})
                    worst_hom = std::max(worst_hom,
                                         std::abs(fn.eval(CurvaturePoint(scale * k)) - scale * f) / (scale * f));
                const auto d = fn.derivatives(CurvaturePoint(k));
                worst_euler = std::max(worst_euler, std::abs(d.grad.dot(k) - f) / f);
            }
            CHECK(worst_perm <= 1e-14);
            CHECK(worst_hom <= 1e-12);
            CHECK(worst_euler <= 1e-10);
        }
    }
}

TEST_CASE("dual")
{
    const auto mean = CurvatureFunction::shifted_mean(2);
    CHECK(mean.dual().eval({1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
    // dual Gauss root is sqrt(k1 k2)/2
    CHECK(CurvatureFunction::gauss_root(2).dual().eval({4.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(3);
    for (const auto& fn : catalog(3)) {
        const auto twice = fn.dual().dual();
        CHECK(twice.id() == fn.id());
        for (int s = 0; s < 100; ++s) {
            const CurvaturePoint k(oracle::log_uniform(rng, 3, 1e-2, 1e2));
            const double a = fn.eval(k), b = twice.eval(k);
            CHECK(std::abs(a - b) <= 1e-12 * a);
            // definition f_*(k) = 1/f(1/k)
            const CurvaturePoint inv(k.kappa.cwiseInverse());
            CHECK(fn.dual().eval(k) == doctest::Approx(1.0 / fn.eval(inv)).epsilon(1e-13));
        }
    }
}

TEST_CASE("matrix second derivative")
{
    std::mt19937_64 rng(99);
    const auto mean = CurvatureFunction::shifted_mean(3);
    for (int s = 0; s < 10; ++s)
        CHECK(std::abs(matrix_second_derivative(mean, CurvaturePoint(oracle::log_uniform(rng, 3)),
                                                random_symmetric(rng, 3))) < 1e-14);

    // Gauss root at a tie: 2 sqrt((1+s)(1-s)) has second derivative -2 at s = 0
    const auto gauss = CurvatureFunction::gauss_root(2);
    Eigen::MatrixXd B(2, 2);
    B << 1, 0, 0, -1;
    const double fd = oracle::d2(
        [&](double s) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2) + s * B;
            return matrix_function(gauss, A);
        },
        0.0, 1e-3);
    CHECK(fd == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(matrix_second_derivative(gauss, {1.0, 1.0}, B) == doctest::Approx(fd).epsilon(1e-6));

    // off-diagonal B at a tie exercises the analytic tie limit
    Eigen::MatrixXd C(2, 2);
    C << 0.3, 1.0, 1.0, -0.2;
    for (const auto& fn : catalog(2)) {
        CAPTURE(fn.id());
        const double oracle_value = oracle::d2(
            [&](double s) { return matrix_function(fn, Eigen::MatrixXd::Identity(2, 2) * 1.5 + s * C); }, 0.0, 1e-3);
        CHECK(matrix_second_derivative(fn, {1.5, 1.5}, C) ==
              doctest::Approx(oracle_value).epsilon(1e-5).scale(1.0));
    }

    Eigen::MatrixXd skew(2, 2);
    skew << 0, 1, 0, 0;
    CHECK_THROWS_AS((void)matrix_second_derivative(gauss, {1.0, 2.0}, skew), std::invalid_argument);
}

TEST_CASE("matrix second derivative matches finite differences at distinct eigenvalues")
{
    std::mt19937_64 rng(5);
    for (int n : {2, 3}) {
        for (const auto& fn : catalog(n)) {
            CAPTURE(fn.id());
            for (int s = 0; s < 10; ++s) {
                Eigen::VectorXd k = oracle::log_uniform(rng, n, 0.3, 3.0);
                std::sort(k.data(), k.data() + n);
                for (int i = 1; i < n; ++i) k(i) = std::max(k(i), k(i - 1) + 0.1);
                const Eigen::MatrixXd B = random_symmetric(rng, n);
                const Eigen::MatrixXd A = k.asDiagonal();
                const double fd = oracle::d2([&](double t) { return matrix_function(fn, A + t * B); }, 0.0, 1e-3);
                const double got = matrix_second_derivative(fn, CurvaturePoint(k), B);
                CHECK(std::abs(got - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("concave entries have nonpositive second derivative over matrices")
{
    std::mt19937_64 rng(17);
    for (int n : {2, 3}) {
        for (const auto& fn : catalog(n)) {
            if (!fn.flags().concave) continue;
            CAPTURE(fn.id());
            double worst = -1.0;
            for (int s = 0; s < 200; ++s)
                worst = std::max(worst, matrix_second_derivative(fn, CurvaturePoint(oracle::log_uniform(rng, n)),
                                                                 random_symmetric(rng, n)));
            CHECK(worst <= 1e-8);
        }
    }
}

TEST_CASE("Cauchy-Schwarz form of inverse concavity for the shifted mean")
{
    // 2 sum(y_k^2 / k_k) >= (2 / sum k)(sum y)^2
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (int s = 0; s < 500; ++s) {
        const Eigen::VectorXd k = oracle::log_uniform(rng, 3, 1e-3, 1e3);
        Eigen::VectorXd y(3);
        for (int i = 0; i < 3; ++i) y(i) = g(rng);
        const double lhs = 2.0 * (y.array().square() / k.array()).sum();
        const double rhs = 2.0 / k.sum() * y.sum() * y.sum();
        CHECK(lhs >= rhs * (1.0 - 1e-12));
    }
}

TEST_CASE("certification flags")
{
    auto flag = [](const CertificationReport& r, const std::string& name) {
        for (const auto& c : r.checks)
            if (c.name == name) return c.passed;
        FAIL("missing check " << name);
        return false;
    };
    const auto mean = CurvatureFunction::shifted_mean(2);
    CHECK(mean.flags().concave);
    CHECK(mean.flags().inverse_concave);
    CHECK_FALSE(mean.flags().f_vanishes_on_boundary);
    const auto rep = certify_structure(mean, 1000, 1);
    CHECK(rep.all_passed());
    CHECK(flag(rep, "f_boundary_vanishing"));

    const auto gauss = CurvatureFunction::gauss_root(2);
    CHECK(gauss.flags().concave);
    CHECK(gauss.flags().inverse_concave);
    CHECK(gauss.flags().f_vanishes_on_boundary);
    CHECK(certify_structure(gauss, 1000, 1).all_passed());

    const auto h2 = CurvatureFunction::power_mean(2, 2.0);
    CHECK_FALSE(h2.flags().concave);
    CHECK(certify_structure(h2, 1000, 1).all_passed());
}

TEST_CASE("the quadratic mean has a convex direction")
{
    const auto h2 = CurvatureFunction::power_mean(2, 2.0);
    const auto d = h2.derivatives({1.0, 3.0});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.hess);
    CHECK(es.eigenvalues().maxCoeff() > 1e-3);
}

TEST_CASE("certification is deterministic and serializes")
{
    const auto f = CurvatureFunction::from_id("power-mean:r=-1", 3);
    const auto a = certify_structure(f, 200, 42);
    const auto b = certify_structure(f, 200, 42);
    CHECK(a.to_json() == b.to_json());
    const auto j = nlohmann::json::parse(a.to_json());
    CHECK(j["id"] == "power-mean:r=-1");
    REQUIRE(j["checks"].is_array());
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("name"));
        CHECK(c.contains("passed"));
        CHECK(c.contains("worst_violation"));
        CHECK(c.contains("witness"));
    }
}
