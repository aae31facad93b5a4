#include "gaussrec/covariance.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <stdexcept>

namespace gaussrec {

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& residuals) {
    if (!residuals.allFinite()) {
        throw std::invalid_argument("residual matrix has non-finite entries");
    }
    return residuals.rowwise() - residuals.colwise().mean();
}

}  // namespace

std::string to_string(CovarianceKind kind) {
    switch (kind) {
        case CovarianceKind::sample: return "sample";
        case CovarianceKind::shrinkage: return "shrinkage";
        case CovarianceKind::diagonal: return "diagonal";
    }
    return "sample";
}

CovarianceKind parse_covariance_kind(const std::string& text) {
    if (text == "sample") return CovarianceKind::sample;
    if (text == "shrink" || text == "shrinkage") return CovarianceKind::shrinkage;
    if (text == "diagonal" || text == "diag") return CovarianceKind::diagonal;
    throw std::invalid_argument("unknown covariance kind '" + text + "'");
}

CovarianceEstimate sample_cov(const Eigen::MatrixXd& residuals) {
    if (residuals.rows() < 2) {
        throw std::invalid_argument("sample_cov needs at least 2 rows");
    }
    if (residuals.cols() < 1) {
        throw std::invalid_argument("sample_cov needs at least 1 column");
    }
    const Eigen::MatrixXd e = centered(residuals);
    CovarianceEstimate out;
    out.w = (e.transpose() * e) / static_cast<double>(e.rows());
    out.w = 0.5 * (out.w + out.w.transpose());
    out.kind = CovarianceKind::sample;
    out.n_rows_used = static_cast<int>(e.rows());
    return out;
}

CovarianceEstimate shrink_cov(const Eigen::MatrixXd& residuals) {
    if (residuals.rows() < 3) {
        throw std::invalid_argument("shrink_cov needs at least 3 rows");
    }
    CovarianceEstimate sample = sample_cov(residuals);
    const auto t = static_cast<double>(residuals.rows());
    const Eigen::VectorXd var = sample.w.diagonal();
    if ((var.array() <= 0.0).any()) {
        throw std::invalid_argument("shrink_cov: a residual column has zero variance");
    }
    const Eigen::VectorXd inv_sd = var.array().rsqrt();
    const Eigen::MatrixXd xs = centered(residuals) * inv_sd.asDiagonal();

    // r_ij = mean_t(xs_ti xs_tj); Var(r_ij) estimated from the T products.
    const Eigen::MatrixXd cross = xs.transpose() * xs;
    const Eigen::MatrixXd sq = xs.array().square().matrix();
    const Eigen::MatrixXd cross_sq = sq.transpose() * sq;
    const Eigen::MatrixXd corr = cross / t;
    Eigen::MatrixXd v = (cross_sq - cross.array().square().matrix() / t) / (t * (t - 1.0));

    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        for (Eigen::Index j = 0; j < corr.cols(); ++j) {
            if (i == j) continue;
            num += v(i, j);
            den += corr(i, j) * corr(i, j);
        }
    }
    double lambda = den > 0.0 ? num / den : 1.0;
    lambda = std::clamp(lambda, 0.0, 1.0);

    CovarianceEstimate out;
    out.w = (1.0 - lambda) * sample.w;
    out.w.diagonal() = var;
    out.kind = CovarianceKind::shrinkage;
    out.shrink_lambda = lambda;
    out.n_rows_used = sample.n_rows_used;
    return out;
}

CovarianceEstimate diag_cov(const CovarianceEstimate& w) {
    CovarianceEstimate out;
    out.w = w.w.diagonal().asDiagonal();
    out.kind = CovarianceKind::diagonal;
    out.n_rows_used = w.n_rows_used;
    return out;
}

bool is_positive_definite(const Eigen::MatrixXd& w, double tol) {
    if (w.rows() != w.cols()) {
        throw std::invalid_argument("is_positive_definite: matrix is not square");
    }
    if (w.rows() == 0 || !w.allFinite()) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(w);
    if (llt.info() != Eigen::Success) return false;
    return (llt.matrixLLT().diagonal().array().square() > tol).all();
}

}  // namespace gaussrec
