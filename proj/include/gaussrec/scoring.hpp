#pragma once

#include "gaussrec/reconcile.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace gaussrec {

// All scores are negatively oriented: smaller is better.

struct GaussianDensity {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// N x d matrix of draws (one draw per row).
struct SampleSet {
    Eigen::MatrixXd draws;
    std::uint64_t seed = 0;
};

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

/// -log p(z) for a multivariate Gaussian.
double logscore(const GaussianDensity& d, const Eigen::VectorXd& z);

/// Log score of the degenerate m-dimensional coherent Gaussian under the
/// pseudo-determinant convention: bottom-level score + 0.5 logdet(S'S).
/// z_full must be coherent (relative tolerance 1e-6).
double logscore_full_structure(const ReconciledGaussian& r, const Eigen::VectorXd& z_full);

GaussianDensity bottom_density(const ReconciledGaussian& r);

double crps_gaussian(double mean, double sd, double z);

/// (1/N) sum|x_i - z| - (1/2N^2) sum_ij |x_i - x_j|. Exact double sum for
/// N <= 2000, sorted O(N log N) evaluation above.
double crps_empirical(std::span<const double> samples, double z);
double crps_empirical_double_sum(std::span<const double> samples, double z);
double crps_empirical_sorted(std::span<const double> samples, double z);

/// Central (1 - alpha) interval score; points on the boundary are not penalised.
double interval_score(double lower, double upper, double alpha, double z);

/// Consecutive-pair estimator
///   (1/N) sum ||x_i - z|| - 1/(2(N-1)) sum_{i<N} ||x_i - x_{i+1}||.
double energy_score(const SampleSet& samples, const Eigen::VectorXd& z);

/// sum_ij w_ij (|z_i - z_j|^p - mean_k |x_ki - x_kj|^p)^2 over all ordered pairs.
double variogram_score(const SampleSet& samples, const Eigen::VectorXd& z, double p, const Eigen::MatrixXd& weights);
/// Unit weights.
double variogram_score(const SampleSet& samples, const Eigen::VectorXd& z, double p = 0.5);

/// rows x cols standard normals from the counter-based stream keyed by seed,
/// filled row by row.
Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// mean + L xi per draw, L the lower Cholesky factor and xi standard normal
/// from the counter-based generator keyed by seed. Bit-reproducible.
SampleSet sample_gaussian(const GaussianDensity& d, int n, std::uint64_t seed);

/// Draws from the coherent density: S (bottom_mean + L xi).
SampleSet sample_reconciled(const ReconciledGaussian& r, int n, std::uint64_t seed);

}  // namespace gaussrec
