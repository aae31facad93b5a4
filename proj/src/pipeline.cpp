#include "gaussrec/pipeline.hpp"

#include "gaussrec/linalg.hpp"
#include "gaussrec/rng.hpp"
#include "gaussrec/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gaussrec {

namespace {

std::string lower(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    return text;
}

/// Draws sharing a fixed matrix of standard normals: mean + xi L'.
Eigen::MatrixXd draws_from(const Eigen::MatrixXd& xi, const GaussianDensity& d) {
    const auto llt = checked_cholesky(d.cov, "sampling covariance");
    Eigen::MatrixXd draws = xi * llt.matrixU();
    draws.rowwise() += d.mean.transpose();
    return draws;
}

}  // namespace

std::vector<MethodSpec> make_methods(const std::vector<std::string>& names, const std::vector<CovarianceKind>& kinds) {
    std::vector<MethodSpec> out;
    for (const auto& raw : names) {
        const std::string name = lower(raw);
        std::string canonical;
        if (name == "base") {
            canonical = "Base";
        } else {
            canonical = to_string(parse_method_tag(name));
        }
        for (const auto kind : kinds) {
            MethodSpec spec{canonical, kind};
            if (std::find(out.begin(), out.end(), spec) == out.end()) out.push_back(spec);
        }
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<CovarianceKind> parse_kind_selection(const std::string& text) {
    if (text == "both") return {CovarianceKind::sample, CovarianceKind::shrinkage};
    const auto kind = parse_covariance_kind(text);
    if (kind == CovarianceKind::diagonal) throw std::invalid_argument("covariance selection must be sample, shrink or both");
    return {kind};
}

std::string interval_score_name(double alpha) {
    return "IS" + std::to_string(static_cast<int>(std::lround(100.0 * (1.0 - alpha))));
}

void estimate_covariances(const Eigen::MatrixXd& residuals, ForecastCase& fc) {
    try {
        fc.sample = sample_cov(residuals);
    } catch (const std::exception& e) {
        fc.sample_error = e.what();
    }
    try {
        fc.shrinkage = shrink_cov(residuals);
    } catch (const std::exception& e) {
        fc.shrinkage_error = e.what();
    }
}

std::vector<MethodOutcome> score_forecast(const ForecastCase& fc, const std::vector<MethodSpec>& methods,
                                          const ScoreOptions& options, int replication, std::uint64_t sample_seed,
                                          RunResult& out) {
    const SummingMatrix& s = *fc.s;
    if (fc.base_forecast.size() != s.m || fc.realized.size() != s.m) {
        throw std::invalid_argument("score_forecast: forecast/observation length must equal m");
    }
    const bool need_draws = options.energy || options.variogram;
    Eigen::MatrixXd xi_bottom;
    Eigen::MatrixXd xi_full;
    const std::uint64_t base_seed = derive_stream(sample_seed, 1);
    const Eigen::VectorXd realized_bottom = fc.realized.tail(s.n);

    std::vector<MethodOutcome> outcomes;
    for (const auto& method : methods) {
        MethodOutcome outcome;
        outcome.method = method;
        const std::string kind = method.kind_name();
        const CovarianceEstimate* w = nullptr;
        if (method.kind == CovarianceKind::sample && fc.sample) w = &*fc.sample;
        if (method.kind == CovarianceKind::shrinkage && fc.shrinkage) w = &*fc.shrinkage;
        if (w == nullptr) {
            std::string reason = method.kind == CovarianceKind::sample ? fc.sample_error : fc.shrinkage_error;
            if (reason.empty()) reason = "covariance estimate unavailable";
            out.failures.push_back({replication, method.name, kind, reason});
            outcomes.push_back(std::move(outcome));
            continue;
        }

        std::vector<ScoreRecord> local;
        auto emit = [&](const std::string& score, const std::string& label, double value) {
            if (!std::isfinite(value)) throw NumericalError(score + " is not finite");
            local.push_back({replication, method.name, kind, score, label, value});
        };
        try {
            Eigen::VectorXd mean;
            Eigen::VectorXd variance;
            if (method.is_base()) {
                const GaussianDensity density{fc.base_forecast, w->w};
                mean = fc.base_forecast;
                variance = w->w.diagonal();
                if (options.joint_ls) emit("LS", kMultivariateLabel, logscore(density, fc.realized));
                if (need_draws) {
                    if (xi_full.size() == 0) xi_full = standard_normal_matrix(options.draws, s.m, base_seed);
                    const SampleSet samples{draws_from(xi_full, density), base_seed};
                    if (options.energy) emit("ES", kMultivariateLabel, energy_score(samples, fc.realized));
                    if (options.variogram)
                        emit("VS", kMultivariateLabel, variogram_score(samples, fc.realized, options.variogram_power));
                }
            } else {
                const auto tag = parse_method_tag(method.name);
                const Eigen::MatrixXd g = g_matrix(tag, s, w->w);
                const ReconciledGaussian r = reconcile_gaussian(g, s, fc.base_forecast, w->w);
                mean = r.full_mean;
                variance = marginal_variances(r);
                if (options.joint_ls) emit("LS", kMultivariateLabel, logscore(bottom_density(r), realized_bottom));
                if (need_draws) {
                    if (xi_bottom.size() == 0) xi_bottom = standard_normal_matrix(options.draws, s.n, sample_seed);
                    const SampleSet samples{draws_from(xi_bottom, bottom_density(r)) * s.s.transpose(), sample_seed};
                    if (options.energy) emit("ES", kMultivariateLabel, energy_score(samples, fc.realized));
                    if (options.variogram)
                        emit("VS", kMultivariateLabel, variogram_score(samples, fc.realized, options.variogram_power));
                }
            }
            for (int i = 0; i < s.m; ++i) {
                const auto& label = s.row_labels[static_cast<std::size_t>(i)];
                const double mu = mean(i);
                const double z = fc.realized(i);
                if (!(variance(i) > 0.0)) throw NumericalError("non-positive marginal variance for " + label);
                const double sd = std::sqrt(variance(i));
                if (options.univariate_ls) {
                    emit("LS", label, logscore({Eigen::VectorXd::Constant(1, mu), Eigen::MatrixXd::Constant(1, 1, variance(i))},
                                               Eigen::VectorXd::Constant(1, z)));
                }
                if (options.crps) emit("CRPS", label, crps_gaussian(mu, sd, z));
                for (const double alpha : options.interval_alphas) {
                    const double half = sd * normal_quantile(1.0 - alpha / 2.0);
                    emit(interval_score_name(alpha), label, interval_score(mu - half, mu + half, alpha, z));
                }
                if (options.squared_error) emit("MSE", label, (mu - z) * (mu - z));
            }
            outcome.ok = true;
            outcome.point = std::move(mean);
            outcome.marginal_variance = std::move(variance);
            out.records.insert(out.records.end(), local.begin(), local.end());
        } catch (const std::exception& e) {
            out.failures.push_back({replication, method.name, kind, e.what()});
        }
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

}  // namespace gaussrec
