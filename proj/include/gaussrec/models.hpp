#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace gaussrec {

/// Fitted ARMA(p, q) with mean, estimated by conditional sum of squares.
///   (y_t - mean) = sum_i ar[i] (y_{t-i} - mean) + e_t + sum_j ma[j] e_{t-j}
struct ArmaModel {
    int p = 0;
    int q = 0;
    bool include_mean = true;
    std::vector<double> ar_coeffs;
    std::vector<double> ma_coeffs;
    double mean = 0.0;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aicc = 0.0;
    int n_obs = 0;
    /// Number of residuals entering the CSS objective.
    int n_effective = 0;
    int iterations = 0;

    /// Leading residuals affected by pre-sample zeros.
    int burn_in() const { return p > q ? p : q; }
    /// k = p + q + 1 (mean) + 1 (variance).
    int parameter_count() const { return p + q + (include_mean ? 1 : 0) + 1; }
};

/// Largest modulus of the inverse roots of 1 - c_1 z - ... - c_k z^k
/// (sign = -1) or 1 + c_1 z + ... + c_k z^k (sign = +1). Values below one
/// mean every root lies outside the unit circle.
double max_inverse_root_modulus(std::span<const double> coeffs, int sign);

bool is_stationary(const ArmaModel& model, double tol = 1e-6);
bool is_invertible(const ArmaModel& model, double tol = 1e-6);

struct ArmaFitOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;
    /// First time index entering the CSS sum; negative means p.
    int condition_on = -1;
};

/// Fits a single (p, q) order. Throws std::runtime_error when the optimum is
/// non-stationary or the residual variance is degenerate.
ArmaModel fit_arma_order(std::span<const double> series, int p, int q, const ArmaFitOptions& options = {});

struct ArmaSelection {
    ArmaModel best;
    std::vector<ArmaModel> candidates;
    /// (p, q) pairs rejected because the fit was non-stationary/non-invertible or failed.
    std::vector<std::pair<int, int>> rejected;
};

/// Grid search over (p, q) in [0, max_p] x [0, max_q] minimising AICc. All
/// candidates are conditioned on the same first max_p observations so their
/// likelihoods are comparable. Candidates with an AR or MA root of modulus
/// below 1.01 are rejected.
ArmaSelection select_arma(std::span<const double> series, int max_p, int max_q);

ArmaModel fit_arma(std::span<const double> series, int max_p, int max_q);

/// h-step forecasts with future innovations set to zero.
std::vector<double> forecast(const ArmaModel& model, std::span<const double> series, int h);

/// One-step in-sample errors e_t = y_t - yhat_{t|t-1} with pre-sample values
/// set to zero. The first model.burn_in() entries are burn-in.
std::vector<double> insample_residuals(const ArmaModel& model, std::span<const double> series);

/// Optional preprocessing applied before ARMA fitting; forecasts are
/// integrated back to the original scale.
struct Differencing {
    enum class Kind { none, first, seasonal };
    Kind kind = Kind::none;
    int period = 1;

    int lag() const { return kind == Kind::none ? 0 : period; }
    std::string to_string() const;
    /// Accepts "none", "first" or "seasonal:<period>".
    static Differencing parse(const std::string& text);
};

std::vector<double> apply_differencing(std::span<const double> series, const Differencing& d);

struct BaseForecastSet {
    /// h-step-ahead base forecasts, one per panel column.
    Eigen::VectorXd point;
    /// Forecasts for steps 1..h, h x m.
    Eigen::MatrixXd path;
    /// One-step in-sample errors with burn-in rows removed jointly, rows x m.
    Eigen::MatrixXd residuals;
    int h = 1;
    std::vector<ArmaModel> models;
};

struct BaseForecastOptions {
    int max_p = 3;
    int max_q = 3;
    Differencing differencing{};
};

/// Fits every column independently and assembles base forecasts plus the
/// common-index residual matrix. Errors name the failing column.
BaseForecastSet base_forecast_all(const Eigen::MatrixXd& panel, int h, const BaseForecastOptions& options = {},
                                  const std::vector<std::string>& labels = {});

}  // namespace gaussrec
