#pragma once

#include "gaussrec/covariance.hpp"
#include "gaussrec/hierarchy.hpp"
#include "gaussrec/records.hpp"
#include "gaussrec/reconcile.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gaussrec {

/// A forecasting method as reported: "Base" (unreconciled) or one of the
/// reconciliation tags, paired with the covariance estimator used for its
/// predictive density.
struct MethodSpec {
    std::string name;
    CovarianceKind kind = CovarianceKind::sample;

    bool is_base() const { return name == "Base"; }
    std::string kind_name() const { return to_string(kind); }
    bool operator==(const MethodSpec&) const = default;
};

/// Every requested method name crossed with every requested kind, in the
/// given order. Names are case-insensitive ("base", "bu", "ols", "wls", "mint").
std::vector<MethodSpec> make_methods(const std::vector<std::string>& names, const std::vector<CovarianceKind>& kinds);

/// Comma-separated list, e.g. "bu,ols,wls,mint".
std::vector<std::string> split_list(const std::string& text);

/// "sample", "shrink" or "both".
std::vector<CovarianceKind> parse_kind_selection(const std::string& text);

struct ScoreOptions {
    bool joint_ls = true;
    bool energy = true;
    bool variogram = true;
    bool univariate_ls = true;
    bool crps = true;
    bool squared_error = true;
    std::vector<double> interval_alphas{0.2, 0.05};
    int draws = 10000;
    double variogram_power = 0.5;
};

/// "IS80" for alpha = 0.2.
std::string interval_score_name(double alpha);

struct ForecastCase {
    const SummingMatrix* s = nullptr;
    Eigen::VectorXd base_forecast;   // m
    Eigen::VectorXd realized;        // m, coherent
    std::optional<CovarianceEstimate> sample;
    std::optional<CovarianceEstimate> shrinkage;
    std::string sample_error;
    std::string shrinkage_error;
};

/// Estimates both covariance kinds from a residual matrix, recording the
/// reason for any estimator that fails.
void estimate_covariances(const Eigen::MatrixXd& residuals, ForecastCase& fc);

struct MethodOutcome {
    MethodSpec method;
    bool ok = false;
    Eigen::VectorXd point;              // m
    Eigen::VectorXd marginal_variance;  // m
};

/// Reconciles and scores one forecast for every method. Reconciled methods
/// share the bottom-level normal draws (seeded by sample_seed) and Base uses
/// its own stream, so comparisons across methods use common random numbers.
/// Joint LS is the bottom-level density score; ES and VS use the full m-vector.
std::vector<MethodOutcome> score_forecast(const ForecastCase& fc, const std::vector<MethodSpec>& methods,
                                          const ScoreOptions& options, int replication, std::uint64_t sample_seed,
                                          RunResult& out);

}  // namespace gaussrec
