#include "gaussrec/scoring.hpp"

#include "gaussrec/linalg.hpp"
#include "gaussrec/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gaussrec {

namespace {

constexpr std::size_t kExactCrpsLimit = 2000;

void check_dims(const SampleSet& samples, const Eigen::VectorXd& z, const char* what) {
    if (samples.draws.cols() != z.size()) {
        throw std::invalid_argument(std::string(what) + ": sample dimension " + std::to_string(samples.draws.cols()) +
                                    " does not match observation dimension " + std::to_string(z.size()));
    }
}

}  // namespace

Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    CounterRng rng(seed, 0);
    Eigen::MatrixXd xi(rows, cols);
    // Row-major fill so the first k draws do not depend on N.
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) xi(i, j) = rng.normal();
    }
    return xi;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double logscore(const GaussianDensity& d, const Eigen::VectorXd& z) {
    if (z.size() != d.mean.size() || d.cov.rows() != d.mean.size() || d.cov.cols() != d.mean.size()) {
        throw std::invalid_argument("logscore: dimension mismatch");
    }
    const auto llt = checked_cholesky(d.cov, "predictive covariance");
    const Eigen::VectorXd white = llt.matrixL().solve(z - d.mean);
    const double dim = static_cast<double>(z.size());
    return 0.5 * dim * std::log(2.0 * std::numbers::pi) + 0.5 * logdet(llt) + 0.5 * white.squaredNorm();
}

GaussianDensity bottom_density(const ReconciledGaussian& r) { return {r.bottom_mean, r.bottom_cov}; }

double logscore_full_structure(const ReconciledGaussian& r, const Eigen::VectorXd& z_full) {
    const double scale = std::max(1.0, z_full.cwiseAbs().maxCoeff());
    if (coherence_discrepancy(r.s, z_full) > 1e-6 * scale) {
        throw std::invalid_argument("logscore_full_structure: observation is not coherent");
    }
    return logscore(bottom_density(r), z_full.tail(r.s.n)) + structure_logdet_offset(r.s);
}

double crps_gaussian(double mean, double sd, double z) {
    if (!(sd > 0.0)) throw std::invalid_argument("crps_gaussian: sd must be positive");
    const double w = (z - mean) / sd;
    return sd * (w * (2.0 * normal_cdf(w) - 1.0) + 2.0 * normal_pdf(w) - 1.0 / std::sqrt(std::numbers::pi));
}

double crps_empirical_double_sum(std::span<const double> x, double z) {
    if (x.empty()) throw std::invalid_argument("crps_empirical: no samples");
    const double n = static_cast<double>(x.size());
    double first = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        first += std::abs(x[i] - z);
        for (std::size_t j = 0; j < x.size(); ++j) pairs += std::abs(x[i] - x[j]);
    }
    return first / n - pairs / (2.0 * n * n);
}

double crps_empirical_sorted(std::span<const double> x, double z) {
    if (x.empty()) throw std::invalid_argument("crps_empirical: no samples");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double first = 0.0;
    // sum_ij |x_i - x_j| = 2 sum_i (2i - n + 1) x_(i), zero-based order statistics.
    double pairs = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        first += std::abs(sorted[i] - z);
        pairs += (2.0 * static_cast<double>(i) - n + 1.0) * sorted[i];
    }
    pairs *= 2.0;
    return first / n - pairs / (2.0 * n * n);
}

double crps_empirical(std::span<const double> x, double z) {
    return x.size() <= kExactCrpsLimit ? crps_empirical_double_sum(x, z) : crps_empirical_sorted(x, z);
}

double interval_score(double lower, double upper, double alpha, double z) {
    if (lower > upper) throw std::invalid_argument("interval_score: lower bound exceeds upper bound");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("interval_score: alpha must lie in (0, 1)");
    double score = upper - lower;
    if (z < lower) score += 2.0 / alpha * (lower - z);
    if (z > upper) score += 2.0 / alpha * (z - upper);
    return score;
}

double energy_score(const SampleSet& samples, const Eigen::VectorXd& z) {
    check_dims(samples, z, "energy_score");
    const auto& x = samples.draws;
    const Eigen::Index n = x.rows();
    if (n < 2) throw std::invalid_argument("energy_score needs at least 2 draws");
    const double first = (x.rowwise() - z.transpose()).rowwise().norm().sum() / static_cast<double>(n);
    const double second = (x.topRows(n - 1) - x.bottomRows(n - 1)).rowwise().norm().sum();
    return first - second / (2.0 * static_cast<double>(n - 1));
}

double variogram_score(const SampleSet& samples, const Eigen::VectorXd& z, double p, const Eigen::MatrixXd& weights) {
    check_dims(samples, z, "variogram_score");
    const Eigen::Index d = z.size();
    if (weights.rows() != d || weights.cols() != d) {
        throw std::invalid_argument("variogram_score: weight matrix dimension mismatch");
    }
    if (!(p > 0.0)) throw std::invalid_argument("variogram_score: p must be positive");
    if ((weights.array() < 0.0).any()) throw std::invalid_argument("variogram_score: negative weight");
    const auto& x = samples.draws;
    if (x.rows() < 1) throw std::invalid_argument("variogram_score: no samples");
    const double n = static_cast<double>(x.rows());
    const bool root = p == 0.5;
    double total = 0.0;
    Eigen::ArrayXd diff(x.rows());
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double wsum = weights(i, j) + weights(j, i);
            if (wsum == 0.0) continue;
            diff = (x.col(i) - x.col(j)).array().abs();
            const double expected = (root ? diff.sqrt().sum() : diff.pow(p).sum()) / n;
            const double observed = std::pow(std::abs(z(i) - z(j)), p);
            total += wsum * (observed - expected) * (observed - expected);
        }
    }
    return total;
}

double variogram_score(const SampleSet& samples, const Eigen::VectorXd& z, double p) {
    return variogram_score(samples, z, p, Eigen::MatrixXd::Ones(z.size(), z.size()));
}

SampleSet sample_gaussian(const GaussianDensity& d, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_gaussian: n must be at least 1");
    if (d.cov.rows() != d.mean.size() || d.cov.cols() != d.mean.size()) {
        throw std::invalid_argument("sample_gaussian: dimension mismatch");
    }
    const auto llt = checked_cholesky(d.cov, "sampling covariance");
    const Eigen::MatrixXd xi = standard_normal_matrix(n, d.mean.size(), seed);
    SampleSet out;
    out.seed = seed;
    out.draws = xi * llt.matrixU();
    out.draws.rowwise() += d.mean.transpose();
    return out;
}

SampleSet sample_reconciled(const ReconciledGaussian& r, int n, std::uint64_t seed) {
    SampleSet bottom = sample_gaussian(bottom_density(r), n, seed);
    bottom.draws = bottom.draws * r.s.s.transpose();
    return bottom;
}

}  // namespace gaussrec
