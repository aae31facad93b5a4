#include "gaussrec/linalg.hpp"

#include <cmath>

namespace gaussrec {

Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& a,
                                             const std::string& what,
                                             double rel_tol) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument(what + ": matrix is not square");
    }
    if (a.rows() == 0) {
        throw std::invalid_argument(what + ": empty matrix");
    }
    if (!a.allFinite()) {
        throw NumericalError(what + ": matrix has non-finite entries");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(what + ": Cholesky factorisation failed (matrix not positive definite)");
    }
    const double threshold = rel_tol * a.trace() / static_cast<double>(a.rows());
    if (!(min_pivot(llt) > threshold)) {
        throw NumericalError(what + ": matrix is numerically singular");
    }
    return llt;
}

double logdet(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const auto l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        acc += std::log(l(i, i));
    }
    return 2.0 * acc;
}

double min_pivot(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return llt.matrixLLT().diagonal().array().square().minCoeff();
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
    return 0.5 * (a + a.transpose());
}

}  // namespace gaussrec
