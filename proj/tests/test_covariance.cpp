#include "gaussrec/covariance.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gaussrec;

namespace {

Eigen::MatrixXd gaussian_panel(int t, const Eigen::MatrixXd& cov, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    const Eigen::MatrixXd l = cov.llt().matrixL();
    Eigen::MatrixXd z(t, cov.rows());
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < cov.rows(); ++j) z(i, j) = nd(gen);
    return z * l.transpose();
}

/// Shrinkage intensity written out directly from the correlation-variance formula.
double lambda_oracle(const Eigen::MatrixXd& e) {
    const Eigen::Index t = e.rows(), m = e.cols();
    Eigen::MatrixXd x = e.rowwise() - e.colwise().mean();
    for (Eigen::Index j = 0; j < m; ++j) x.col(j) /= std::sqrt(x.col(j).squaredNorm() / static_cast<double>(t));
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            const Eigen::ArrayXd w = x.col(i).array() * x.col(j).array();
            const double wbar = w.mean();
            const double tt = static_cast<double>(t);
            num += tt / std::pow(tt - 1.0, 3) * (w - wbar).square().sum();
            const double r = tt / (tt - 1.0) * wbar;
            den += r * r;
        }
    }
    return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace

TEST_CASE("sample covariance uses the 1/T divisor") {
    Eigen::MatrixXd e(2, 2);
    e << 1, -1, -1, 1;
    const auto w = sample_cov(e);
    CHECK(w.kind == CovarianceKind::sample);
    CHECK(w.w.isApprox((Eigen::MatrixXd(2, 2) << 1, -1, -1, 1).finished()));
    CHECK(w.n_rows_used == 2);
    CHECK_FALSE(w.shrink_lambda.has_value());
}

TEST_CASE("sample variance of N(0,4)") {
    const auto e = gaussian_panel(10000, Eigen::MatrixXd::Constant(1, 1, 4.0), 1);
    const double v = sample_cov(e).w(0, 0);
    CHECK(v > 3.7);
    CHECK(v < 4.3);
}

TEST_CASE("constant column yields a zero row for the sample kind and an error for shrinkage") {
    Eigen::MatrixXd e = gaussian_panel(50, Eigen::MatrixXd::Identity(2, 2), 2);
    e.col(1).setConstant(3.0);
    const auto w = sample_cov(e);
    CHECK(w.w.row(1).isZero());
    CHECK_THROWS_AS(shrink_cov(e), std::invalid_argument);
}

TEST_CASE("sample covariance errors") {
    CHECK_THROWS_AS(sample_cov(Eigen::MatrixXd::Ones(1, 2)), std::invalid_argument);
    Eigen::MatrixXd e = Eigen::MatrixXd::Random(5, 2);
    e(1, 1) = std::nan("");
    CHECK_THROWS_AS(sample_cov(e), std::invalid_argument);
}

TEST_CASE("shrinkage keeps the diagonal and matches the oracle intensity") {
    Eigen::MatrixXd cov(3, 3);
    cov << 2, 0.5, 0.2, 0.5, 1, 0.3, 0.2, 0.3, 3;
    const auto e = gaussian_panel(40, cov, 3);
    const auto sam = sample_cov(e);
    const auto shr = shrink_cov(e);
    CHECK(shr.kind == CovarianceKind::shrinkage);
    REQUIRE(shr.shrink_lambda.has_value());
    CHECK(*shr.shrink_lambda == doctest::Approx(lambda_oracle(e)).epsilon(1e-10));
    CHECK((shr.w.diagonal() - sam.w.diagonal()).cwiseAbs().maxCoeff() == 0.0);
    const double lam = *shr.shrink_lambda;
    Eigen::MatrixXd expected = (1.0 - lam) * sam.w;
    expected.diagonal() = sam.w.diagonal();
    CHECK(shr.w.isApprox(expected, 1e-12));
    CHECK((shr.w - shr.w.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single column shrinkage is the sample variance") {
    const auto e = gaussian_panel(30, Eigen::MatrixXd::Identity(1, 1), 4);
    CHECK(shrink_cov(e).w(0, 0) == sample_cov(e).w(0, 0));
}

TEST_CASE("independent columns shrink strongly, correlated long samples barely") {
    double mean_lambda = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        mean_lambda += *shrink_cov(gaussian_panel(50, Eigen::MatrixXd::Identity(2, 2), 100 + seed)).shrink_lambda;
    CHECK(mean_lambda / 200.0 >= 0.5);

    Eigen::MatrixXd cov(2, 2);
    cov << 1, 0.8, 0.8, 1;
    CHECK(*shrink_cov(gaussian_panel(5000, cov, 7)).shrink_lambda < 0.1);
}

TEST_CASE("estimators are invariant to row permutation") {
    Eigen::MatrixXd cov(3, 3);
    cov << 1, 0.4, 0.1, 0.4, 2, 0.2, 0.1, 0.2, 1;
    const auto e = gaussian_panel(60, cov, 8);
    Eigen::MatrixXd rev = e.colwise().reverse();
    CHECK(sample_cov(e).w.isApprox(sample_cov(rev).w, 1e-12));
    CHECK(shrink_cov(e).w.isApprox(shrink_cov(rev).w, 1e-12));
}

TEST_CASE("diagonal estimate") {
    CovarianceEstimate w;
    w.w = (Eigen::MatrixXd(2, 2) << 2, 1, 1, 3).finished();
    const auto d = diag_cov(w);
    CHECK(d.kind == CovarianceKind::diagonal);
    CHECK(d.w == (Eigen::MatrixXd(2, 2) << 2, 0, 0, 3).finished());
    CHECK(diag_cov(d).w == d.w);
}

TEST_CASE("positive definiteness check") {
    CHECK(is_positive_definite(Eigen::MatrixXd::Identity(3, 3), 1e-12));
    CHECK_FALSE(is_positive_definite((Eigen::MatrixXd(2, 2) << 1, 2, 2, 1).finished(), 1e-12));
    CHECK_THROWS_AS(is_positive_definite(Eigen::MatrixXd::Ones(2, 3), 1e-12), std::invalid_argument);
    const auto e = gaussian_panel(8, Eigen::MatrixXd::Identity(6, 6), 9);
    const auto shr = shrink_cov(e);
    if (*shr.shrink_lambda > 0.0) CHECK(is_positive_definite(shr.w, 1e-12));
}

TEST_CASE("kind names") {
    CHECK(parse_covariance_kind("shrink") == CovarianceKind::shrinkage);
    CHECK(parse_covariance_kind("sample") == CovarianceKind::sample);
    CHECK(to_string(CovarianceKind::shrinkage) == "shrinkage");
    CHECK_THROWS_AS(parse_covariance_kind("ledoit"), std::invalid_argument);
}
