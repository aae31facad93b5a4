#pragma once

#include "gaussrec/covariance.hpp"
#include "gaussrec/hierarchy.hpp"

#include <Eigen/Dense>

#include <string>

namespace gaussrec {

enum class MethodTag { bu, ols, wls, mint };

std::string to_string(MethodTag tag);
/// Case-insensitive: "bu", "ols", "wls", "mint".
MethodTag parse_method_tag(const std::string& text);

struct ReconciliationMethod {
    MethodTag tag = MethodTag::bu;
    CovarianceKind covariance_kind = CovarianceKind::sample;

    bool needs_covariance() const { return tag == MethodTag::wls || tag == MethodTag::mint; }
};

/// n x m reconciliation matrix G:
///   BU   [0 | I]
///   OLS  (S'S)^-1 S'
///   WLS  (S' L^-1 S)^-1 S' L^-1,  L = diag(w)
///   MinT (S' W^-1 S)^-1 S' W^-1
/// Covariance inverses are applied through Cholesky solves.
Eigen::MatrixXd g_matrix(MethodTag tag, const SummingMatrix& s);
Eigen::MatrixXd g_matrix(MethodTag tag, const SummingMatrix& s, const Eigen::MatrixXd& w);
Eigen::MatrixXd g_matrix(const ReconciliationMethod& method, const SummingMatrix& s, const CovarianceEstimate* w);

/// max|GS - I| < tol and max|SGS - S| < tol.
bool check_projection(const SummingMatrix& s, const Eigen::MatrixXd& g, double tol);

/// G* = (S' W^-1 S)^-1 S' W^-1.
Eigen::MatrixXd mint_gstar(const SummingMatrix& s, const Eigen::MatrixXd& w);

/// The same optimum through the constraint-free parameterisation
/// G* = J - J W U (U' W U)^-1 U'.
Eigen::MatrixXd mint_gstar_ju(const SummingMatrix& s, const Eigen::MatrixXd& w);

/// G = J + X U' spans every G with GS = I.
struct JUDecomposition {
    Eigen::MatrixXd j;  // n x m, [0 | I]
    Eigen::MatrixXd u;  // m x m*, U' = [I | -C]
    Eigen::MatrixXd c;  // m* x n
    int m_star = 0;
};

JUDecomposition ju_decompose(const SummingMatrix& s);

/// Expected log score of the reconciled Gaussian when W is the true
/// base-error covariance: K + n/2 + 0.5 logdet(G W G'), K = (n/2) log 2pi + 0.5 logdet(S'S).
double expected_logscore_objective(const Eigen::MatrixXd& g, const Eigen::MatrixXd& w, const SummingMatrix& s);

/// 0.5 logdet(S'S): the offset between full-structure and bottom-level log scores.
double structure_logdet_offset(const SummingMatrix& s);

/// Coherent Gaussian predictive density N(S G yhat, S G W G' S').
struct ReconciledGaussian {
    SummingMatrix s;
    Eigen::VectorXd bottom_mean;
    Eigen::MatrixXd bottom_cov;
    Eigen::VectorXd full_mean;
};

/// Throws std::invalid_argument when G is not a projection and NumericalError
/// when G W G' fails the positive-definiteness check.
ReconciledGaussian reconcile_gaussian(const Eigen::MatrixXd& g, const SummingMatrix& s, const Eigen::VectorXd& y_hat,
                                      const Eigen::MatrixXd& w);

/// S_i' (G W G') S_i for every row i of S.
Eigen::VectorXd marginal_variances(const ReconciledGaussian& r);

}  // namespace gaussrec
