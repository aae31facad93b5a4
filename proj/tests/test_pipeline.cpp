#include "gaussrec/pipeline.hpp"
#include "gaussrec/scoring.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace gaussrec;

TEST_CASE("method and kind parsing") {
    const auto methods = make_methods({"base", "MinT"}, parse_kind_selection("both"));
    REQUIRE(methods.size() == 4);
    CHECK(methods[0] == MethodSpec{"Base", CovarianceKind::sample});
    CHECK(methods[3] == MethodSpec{"MinT", CovarianceKind::shrinkage});
    CHECK(split_list(" bu, ols ,,mint") == std::vector<std::string>{"bu", "ols", "mint"});
    CHECK(parse_kind_selection("shrink") == std::vector<CovarianceKind>{CovarianceKind::shrinkage});
    CHECK_THROWS_AS(parse_kind_selection("diag"), std::invalid_argument);
    CHECK_THROWS_AS(make_methods({"topdown"}, {CovarianceKind::sample}), std::invalid_argument);
    CHECK(interval_score_name(0.2) == "IS80");
    CHECK(interval_score_name(0.05) == "IS95");
    CHECK(interval_score_name(0.1) == "IS90");
}

TEST_CASE("scoring one forecast case") {
    std::mt19937_64 gen(3);
    const auto s = build_summing_matrix({{"AA", "AB", "BA"}, {0, 1}});
    Eigen::MatrixXd resid(80, s.m);
    std::normal_distribution<double> nd;
    for (Eigen::Index i = 0; i < resid.size(); ++i) resid.data()[i] = nd(gen);
    ForecastCase fc;
    fc.s = &s;
    fc.base_forecast = Eigen::VectorXd::Random(s.m);
    fc.realized = s.s * Eigen::VectorXd::Random(s.n);
    estimate_covariances(resid, fc);
    REQUIRE(fc.sample.has_value());
    REQUIRE(fc.shrinkage.has_value());

    ScoreOptions opt;
    opt.draws = 200;
    RunResult out;
    const auto methods = make_methods({"base", "bu", "mint"}, {CovarianceKind::shrinkage});
    const auto outcomes = score_forecast(fc, methods, opt, 7, 99, out);
    CHECK(out.failures.empty());
    REQUIRE(outcomes.size() == 3);
    for (const auto& o : outcomes) CHECK(o.ok);
    CHECK(coherence_discrepancy(s, outcomes[2].point) < 1e-10);

    std::map<std::string, double> joint_ls;
    for (const auto& r : out.records) {
        CHECK(r.replication == 7);
        if (r.score_name == "LS" && r.series_label == kMultivariateLabel) joint_ls[r.method] = r.value;
    }
    // Reconciled joint LS is the bottom-level Gaussian score.
    const Eigen::MatrixXd w = fc.shrinkage->w;
    const Eigen::MatrixXd g = oracle::g_gls(s.s, w);
    const Eigen::MatrixXd cov = g * w * g.transpose();
    CHECK(joint_ls["MinT"] ==
          doctest::Approx(oracle::gaussian_logscore(g * fc.base_forecast, cov, fc.realized.tail(s.n))).epsilon(1e-10));

    // Same seed, same scores.
    RunResult again;
    score_forecast(fc, methods, opt, 7, 99, again);
    REQUIRE(again.records.size() == out.records.size());
    for (std::size_t i = 0; i < out.records.size(); ++i) CHECK(again.records[i].value == out.records[i].value);
}

TEST_CASE("a missing covariance is recorded as a failure") {
    const auto s = build_summing_matrix({{"AA", "AB"}, {0}});
    ForecastCase fc;
    fc.s = &s;
    fc.base_forecast = Eigen::VectorXd::Ones(3);
    fc.realized = s.s * Eigen::VectorXd::Ones(2);
    fc.sample_error = "rank deficient";
    RunResult out;
    const auto outcomes = score_forecast(fc, make_methods({"mint"}, {CovarianceKind::sample}), {}, 0, 1, out);
    CHECK_FALSE(outcomes[0].ok);
    REQUIRE(out.failures.size() == 1);
    CHECK(out.failures[0].reason == "rank deficient");
}
