#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace gaussrec {

enum class CovarianceKind { sample, shrinkage, diagonal };

std::string to_string(CovarianceKind kind);
/// Accepts "sample", "shrink"/"shrinkage" and "diagonal".
CovarianceKind parse_covariance_kind(const std::string& text);

struct CovarianceEstimate {
    Eigen::MatrixXd w;
    CovarianceKind kind = CovarianceKind::sample;
    /// Present iff kind == shrinkage.
    std::optional<double> shrink_lambda;
    int n_rows_used = 0;
};

/// (1/T) E'E on the column-demeaned residual matrix.
CovarianceEstimate sample_cov(const Eigen::MatrixXd& residuals);

/// Shrinks the sample correlations toward zero (diagonal target) with the
/// data-driven intensity
///   lambda = sum_{i!=j} Var(r_ij) / sum_{i!=j} r_ij^2, clipped to [0, 1].
/// The diagonal of the sample covariance is kept exactly.
CovarianceEstimate shrink_cov(const Eigen::MatrixXd& residuals);

/// Zeroes the off-diagonal entries.
CovarianceEstimate diag_cov(const CovarianceEstimate& w);

/// True iff a Cholesky factorisation succeeds with every pivot L(i,i)^2 > tol.
bool is_positive_definite(const Eigen::MatrixXd& w, double tol);

}  // namespace gaussrec
