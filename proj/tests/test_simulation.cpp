#include "gaussrec/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace gaussrec;

namespace {

Eigen::MatrixXd innovations(const Eigen::MatrixXd& panel, const Eigen::MatrixXd& a) {
    const Eigen::Index t = panel.rows();
    return panel.bottomRows(t - 1) - panel.topRows(t - 1) * a.transpose();
}

Eigen::MatrixXd setup1_a() {
    const auto [a1, a2] = var1_coefficients_setup1();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a.topLeftCorner(2, 2) = a1;
    a.bottomRightCorner(2, 2) = a2;
    return a;
}

}  // namespace

TEST_CASE("setup 1 coefficient eigenvalues") {
    const auto [a1, a2] = var1_coefficients_setup1();
    Eigen::Matrix2d expected;
    expected << 0.3, -0.3 * std::sqrt(3.0), 0.3 * std::sqrt(3.0), 0.3;
    CHECK((a1 - expected).cwiseAbs().maxCoeff() < 1e-12);
    const auto e1 = a1.eigenvalues();
    const auto e2 = a2.eigenvalues();
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(e1(i)) == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(std::abs(std::arg(e1(i))) == doctest::Approx(std::numbers::pi / 3).epsilon(1e-12));
        CHECK(std::abs(e2(i)) == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(std::abs(std::arg(e2(i))) == doctest::Approx(std::numbers::pi / 6).epsilon(1e-12));
    }
    CHECK(setup1_a().eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(0.9));
}

TEST_CASE("setup 1 innovations") {
    const Eigen::Matrix4d sigma = setup1_innovation_cov(0.8);
    CHECK(sigma(0, 1) / std::sqrt(sigma(0, 0) * sigma(1, 1)) == doctest::Approx(0.8));
    CHECK(sigma(0, 2) == 0.0);

    Setup1Config cfg;
    cfg.t_len = 5000;
    cfg.seed = 3;
    cfg.rho = 0.0;
    Eigen::MatrixXd e = innovations(dgp_setup1(cfg, 0), setup1_a());
    Eigen::MatrixXd c = e.rowwise() - e.colwise().mean();
    Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(c.rows());
    CHECK(std::abs(cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1))) < 0.05);

    cfg.rho = 0.8;
    e = innovations(dgp_setup1(cfg, 0), setup1_a());
    c = e.rowwise() - e.colwise().mean();
    cov = c.transpose() * c / static_cast<double>(c.rows());
    CHECK(cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1)) == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("setup 1 panels are stationary") {
    Setup1Config cfg;
    cfg.rho = 0.5;
    cfg.t_len = 2000;
    const Eigen::MatrixXd v = var1_stationary_cov(setup1_a(), setup1_innovation_cov(0.5));
    const Eigen::MatrixXd a = setup1_a();
    CHECK((v - a * v * a.transpose() - Eigen::MatrixXd(setup1_innovation_cov(0.5))).cwiseAbs().maxCoeff() < 1e-10);
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::MatrixXd p = dgp_setup1(cfg, rep);
        const Eigen::MatrixXd c = p.rowwise() - p.colwise().mean();
        for (int j = 0; j < 4; ++j) {
            const double var = c.col(j).squaredNorm() / static_cast<double>(c.rows());
            CHECK(std::isfinite(var));
            CHECK(var < 10.0 * v(j, j));
            CHECK(var > v(j, j) / 10.0);
            CHECK(std::abs(p.col(j).mean()) < 4.0 * std::sqrt(v(j, j) * 20.0 / 2000.0));
        }
    }
}

TEST_CASE("setup 1 is reproducible by (seed, rep)") {
    Setup1Config cfg;
    cfg.t_len = 101;
    CHECK(dgp_setup1(cfg, 4) == dgp_setup1(cfg, 4));
    CHECK(dgp_setup1(cfg, 4) != dgp_setup1(cfg, 5));
    Setup1Config bad;
    bad.rho = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    Setup1Config off;
    off.rho = 0.55;
    CHECK(off.off_grid());
    off.rho = -0.3;
    CHECK_FALSE(off.off_grid());
}

TEST_CASE("setup 2 covariance construction") {
    for (const auto mode : {CorrelationMode::nonnegative, CorrelationMode::mixed}) {
        Setup2Config cfg;
        cfg.correlation_mode = mode;
        cfg.seed = 5;
        for (int rep = 0; rep < 10; ++rep) {
            const Eigen::MatrixXd cov = setup2_innovation_cov(cfg, rep);
            CHECK(cov.rows() == 36);
            Eigen::LLT<Eigen::MatrixXd> llt(cov);
            CHECK(llt.info() == Eigen::Success);
            for (int i = 0; i < 36; ++i) {
                CHECK(cov(i, i) >= 2.0 - 1e-9);
                CHECK(cov(i, i) <= 6.0 + 1e-9);
            }
            if (mode == CorrelationMode::nonnegative) CHECK(cov.minCoeff() >= 0.0);
            else CHECK(cov.minCoeff() < 0.0);
        }
    }
    const Eigen::MatrixXd a = setup2_coefficients(5);
    CHECK(a == setup2_coefficients(5));
    const double radius = a.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(radius < 0.9 + 1e-9);
    CHECK(radius >= 0.4 - 1e-9);
    CHECK(a.block(0, 6, 6, 6).isZero(0.0));
}

TEST_CASE("setup 2 panels aggregate coherently") {
    Setup2Config cfg;
    cfg.t_len = 101;
    const Eigen::MatrixXd bottom = dgp_setup2(cfg, 0);
    CHECK(bottom.rows() == 101);
    CHECK(bottom.cols() == 36);
    const auto s = build_summing_matrix(setup2_hierarchy());
    CHECK(s.m == 43);
    const Eigen::MatrixXd full = aggregate_panel(s, bottom);
    for (int t = 0; t < 101; t += 25) CHECK(coherence_discrepancy(s, full.row(t).transpose()) < 1e-12);
}

TEST_CASE("replication bookkeeping") {
    Setup1Config cfg;
    cfg.rho = 0.3;
    cfg.t_len = 101;
    cfg.reps = 3;
    ReplicationOptions options;
    options.methods = make_methods({"bu"}, {CovarianceKind::sample});
    options.scores.draws = 500;
    const RunResult run = run_replications(cfg, options);
    CHECK(run.failures.empty());
    // per rep: LS, ES, VS jointly, then 7 series x (LS, CRPS, IS80, IS95, MSE).
    CHECK(run.records.size() == 3u * (3u + 7u * 5u));
    const auto table = relative_improvement(run.records);
    for (const auto& row : table) CHECK(row.improvement == 0.0);

    options.methods = default_simulation_methods();
    options.threads = 3;
    const RunResult a = run_replications(cfg, options);
    options.threads = 1;
    const RunResult b = run_replications(cfg, options);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].value == b.records[i].value);
        CHECK(a.records[i].method == b.records[i].method);
    }
}
