#include "gaussrec/reconcile.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace gaussrec;

namespace {

SummingMatrix figure1() { return build_summing_matrix({{"AA", "AB", "AC", "BA", "BB"}, {0, 1}}); }

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("G matrices match explicit-inverse formulas") {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = build_summing_matrix(oracle::random_hierarchy(gen, 12, 30));
        const Eigen::MatrixXd w = oracle::random_pd(s.m, gen);
        const Eigen::MatrixXd lambda = w.diagonal().asDiagonal();
        CHECK(max_abs(g_matrix(MethodTag::bu, s) - oracle::g_bu(s.n, s.m)) == 0.0);
        CHECK(max_abs(g_matrix(MethodTag::ols, s) - oracle::g_ols(s.s)) < 1e-9);
        CHECK(max_abs(g_matrix(MethodTag::wls, s, w) - oracle::g_gls(s.s, lambda)) < 1e-9);
        CHECK(max_abs(g_matrix(MethodTag::mint, s, w) - oracle::g_gls(s.s, w)) < 1e-9);
    }
}

TEST_CASE("special cases of MinT") {
    const auto s = figure1();
    CHECK(max_abs(mint_gstar(s, Eigen::MatrixXd::Identity(8, 8)) - g_matrix(MethodTag::ols, s)) < 1e-12);
    std::mt19937_64 gen(2);
    const Eigen::MatrixXd w = oracle::random_pd(8, gen);
    const Eigen::MatrixXd d = w.diagonal().asDiagonal();
    CHECK(max_abs(mint_gstar(s, d) - g_matrix(MethodTag::wls, s, w)) < 1e-12);
    CHECK(max_abs(mint_gstar(s, w) - mint_gstar_ju(s, w)) < 1e-10);
}

TEST_CASE("BU selects the bottom forecasts; OLS is a projection") {
    const auto s = figure1();
    Eigen::VectorXd y(8);
    y << 15, 6, 9, 1, 2, 3, 4, 5;
    CHECK(g_matrix(MethodTag::bu, s) * y == (Eigen::VectorXd(5) << 1, 2, 3, 4, 5).finished());
    const Eigen::MatrixXd g = g_matrix(MethodTag::ols, s);
    CHECK(max_abs(g * s.s - Eigen::MatrixXd::Identity(5, 5)) < 1e-12);
    CHECK(check_projection(s, g, 1e-10));
    CHECK(check_projection(s, g_matrix(MethodTag::bu, s), 1e-10));
    CHECK_FALSE(check_projection(s, Eigen::MatrixXd::Zero(5, 8), 1e-10));
    CHECK_THROWS_AS(check_projection(s, Eigen::MatrixXd::Zero(4, 8), 1e-10), std::invalid_argument);
}

TEST_CASE("covariance requirements") {
    const auto s = figure1();
    CHECK_THROWS_AS(g_matrix(ReconciliationMethod{MethodTag::mint, CovarianceKind::sample}, s, nullptr),
                    std::invalid_argument);
    Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(8, 8);
    CHECK_THROWS(g_matrix(MethodTag::mint, s, singular));
    CHECK(g_matrix(ReconciliationMethod{MethodTag::ols, CovarianceKind::sample}, s, nullptr).rows() == 5);
}

TEST_CASE("J/U decomposition of the two-level tree") {
    const auto s = figure1();
    const auto ju = ju_decompose(s);
    CHECK(ju.m_star == 3);
    CHECK(ju.c == s.s.topRows(3));
    CHECK(ju.j * s.s == Eigen::MatrixXd::Identity(5, 5));
    CHECK((ju.u.transpose() * s.s).isZero(0.0));
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(ju.u).rank() == 3);
}

TEST_CASE("expected log-score objective") {
    std::mt19937_64 gen(3);
    const auto s = figure1();
    const Eigen::MatrixXd w = oracle::random_pd(8, gen);
    const Eigen::MatrixXd g = g_matrix(MethodTag::mint, s, w);
    const double k = 2.5 * std::log(2.0 * std::numbers::pi) + oracle::half_logdet(s.s.transpose() * s.s);
    CHECK(expected_logscore_objective(g, w, s) ==
          doctest::Approx(k + 2.5 + oracle::half_logdet(g * w * g.transpose())).epsilon(1e-12));
    CHECK(expected_logscore_objective(g, w, s) <= expected_logscore_objective(g_matrix(MethodTag::ols, s), w, s));
    CHECK_THROWS_AS(expected_logscore_objective(Eigen::MatrixXd::Zero(5, 8), w, s), std::invalid_argument);

    // No aggregation: only one projection exists.
    const auto flat = summing_matrix_from_dense(Eigen::MatrixXd::Identity(3, 3));
    const Eigen::MatrixXd w3 = oracle::random_pd(3, gen);
    CHECK(g_matrix(MethodTag::mint, flat, w3).isIdentity(1e-12));
    CHECK(structure_logdet_offset(flat) == 0.0);
}

TEST_CASE("reconciled Gaussian") {
    std::mt19937_64 gen(4);
    const auto s = figure1();
    const Eigen::MatrixXd w = oracle::random_pd(8, gen);
    const Eigen::VectorXd b = Eigen::VectorXd::Random(5);
    const Eigen::VectorXd coherent = s.s * b;
    for (auto tag : {MethodTag::bu, MethodTag::ols, MethodTag::wls, MethodTag::mint}) {
        const auto r = reconcile_gaussian(g_matrix(tag, s, w), s, coherent, w);
        CHECK(max_abs(r.full_mean - coherent) < 1e-10);
        const auto again = reconcile_gaussian(g_matrix(tag, s, w), s, r.full_mean, w);
        CHECK(max_abs(again.full_mean - r.full_mean) < 1e-10);
        const Eigen::VectorXd mv = marginal_variances(r);
        CHECK(max_abs(mv.tail(5) - r.bottom_cov.diagonal()) < 1e-12);
        CHECK(mv(0) == doctest::Approx(r.bottom_cov.sum()));
    }
    const auto bu = reconcile_gaussian(g_matrix(MethodTag::bu, s), s, Eigen::VectorXd::Random(8), w);
    CHECK(max_abs(bu.bottom_cov - w.bottomRightCorner(5, 5)) < 1e-12);
    CHECK_THROWS_AS(reconcile_gaussian(Eigen::MatrixXd::Zero(5, 8), s, coherent, w), std::invalid_argument);
}

TEST_CASE("MinT variances never exceed OLS variances") {
    std::mt19937_64 gen(5);
    const auto s = figure1();
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd w = oracle::random_pd(8, gen, 0.05);
        const Eigen::VectorXd y = Eigen::VectorXd::Random(8);
        const auto mint = reconcile_gaussian(g_matrix(MethodTag::mint, s, w), s, y, w);
        const auto ols = reconcile_gaussian(g_matrix(MethodTag::ols, s), s, y, w);
        CHECK((marginal_variances(mint) - marginal_variances(ols)).maxCoeff() <= 1e-10);
        CHECK(mint.bottom_cov.trace() <= ols.bottom_cov.trace() + 1e-10);
    }
}

TEST_CASE("method tags") {
    CHECK(parse_method_tag("mint") == MethodTag::mint);
    CHECK(parse_method_tag("BU") == MethodTag::bu);
    CHECK(to_string(MethodTag::wls) == "WLS");
    CHECK_THROWS_AS(parse_method_tag("erm"), std::invalid_argument);
}
