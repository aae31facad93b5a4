#pragma once

#include "gaussrec/hierarchy.hpp"
#include "gaussrec/pipeline.hpp"
#include "gaussrec/records.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gaussrec {

/// Four bottom series in two pairs; seven series in total.
struct Setup1Config {
    double rho = 0.0;
    int t_len = 501;
    int reps = 1000;
    std::uint64_t seed = 1;

    /// rho outside {0, +-0.1, ..., +-0.8}.
    bool off_grid() const;
    void validate() const;
};

enum class CorrelationMode { nonnegative, mixed };
std::string to_string(CorrelationMode mode);
CorrelationMode parse_correlation_mode(const std::string& text);

/// 36 bottom series in six groups of six; 43 series in total.
struct Setup2Config {
    CorrelationMode correlation_mode = CorrelationMode::nonnegative;
    int t_len = 501;
    int reps = 1000;
    std::uint64_t seed = 1;

    void validate() const;
};

HierarchySpec setup1_hierarchy();
HierarchySpec setup2_hierarchy();

/// Rotation-form 2x2 blocks with eigenvalues 0.6 e^{+-i pi/3} and 0.9 e^{+-i pi/6}.
std::pair<Eigen::Matrix2d, Eigen::Matrix2d> var1_coefficients_setup1();

/// blockdiag(S1, S1) with S1 = [[2, sqrt(6) rho], [sqrt(6) rho, 3]].
Eigen::Matrix4d setup1_innovation_cov(double rho);

/// Stationary covariance of b_t = A b_{t-1} + e_t, solving V = A V A' + Sigma.
Eigen::MatrixXd var1_stationary_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma);

/// t_len x 4 bottom panel; the last row is the withheld test observation.
Eigen::MatrixXd dgp_setup1(const Setup1Config& cfg, int rep);

/// Block-diagonal VAR(1) coefficients with per-block spectral radius drawn
/// from U(0.4, 0.9); fixed by the seed.
Eigen::MatrixXd setup2_coefficients(std::uint64_t seed);

/// 36 x 36 innovation covariance for one replication.
Eigen::MatrixXd setup2_innovation_cov(const Setup2Config& cfg, int rep);

/// t_len x 36 bottom panel; the last row is the withheld test observation.
Eigen::MatrixXd dgp_setup2(const Setup2Config& cfg, int rep);

struct ReplicationOptions {
    std::vector<MethodSpec> methods;
    ScoreOptions scores;
    int max_p = 3;
    int max_q = 3;
    int threads = 1;
};

/// Default method grid: {Base, BU, OLS, WLS, MinT} x {sample, shrinkage}.
std::vector<MethodSpec> default_simulation_methods();

/// Simulates, fits base ARMA models to every series, reconciles, and scores
/// the withheld observation for each replication. Failures are recorded per
/// method and never abort the batch. Output order depends only on the inputs.
RunResult run_replications(const Setup1Config& cfg, const ReplicationOptions& options);
RunResult run_replications(const Setup2Config& cfg, const ReplicationOptions& options);

}  // namespace gaussrec
