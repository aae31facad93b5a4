#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace gaussrec {

/// Raised when a matrix that must be positive definite is not (singular
/// covariance, rank-deficient residuals). Callers in the replication and
/// evaluation loops catch this and record the failure instead of aborting.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cholesky factorisation that rejects matrices whose smallest pivot
/// L(i,i)^2 falls below rel_tol * trace(a) / dim.
Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& a,
                                             const std::string& what,
                                             double rel_tol = 1e-12);

/// log det(a) from its Cholesky factor.
double logdet(const Eigen::LLT<Eigen::MatrixXd>& llt);

/// Smallest pivot L(i,i)^2 of a successful factorisation.
double min_pivot(const Eigen::LLT<Eigen::MatrixXd>& llt);

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

}  // namespace gaussrec
