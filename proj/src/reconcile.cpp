#include "gaussrec/reconcile.hpp"

#include "gaussrec/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaussrec {

namespace {

constexpr double kProjectionTol = 1e-8;

void check_w(const SummingMatrix& s, const Eigen::MatrixXd& w) {
    if (w.rows() != s.m || w.cols() != s.m) {
        throw std::invalid_argument("covariance must be " + std::to_string(s.m) + " x " + std::to_string(s.m));
    }
}

/// (S' A S)^-1 S' A given A = W^-1 applied as solve.
Eigen::MatrixXd gls_projection(const SummingMatrix& s, const Eigen::MatrixXd& winv_s) {
    // winv_s = W^-1 S (m x n); G = (S' W^-1 S)^-1 (W^-1 S)'
    const Eigen::MatrixXd normal = symmetrize(s.s.transpose() * winv_s);
    const auto llt = checked_cholesky(normal, "S' W^-1 S");
    return llt.solve(winv_s.transpose());
}

}  // namespace

std::string to_string(MethodTag tag) {
    switch (tag) {
        case MethodTag::bu: return "BU";
        case MethodTag::ols: return "OLS";
        case MethodTag::wls: return "WLS";
        case MethodTag::mint: return "MinT";
    }
    return "BU";
}

MethodTag parse_method_tag(const std::string& text) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "bu") return MethodTag::bu;
    if (lower == "ols") return MethodTag::ols;
    if (lower == "wls") return MethodTag::wls;
    if (lower == "mint") return MethodTag::mint;
    throw std::invalid_argument("unknown reconciliation method '" + text + "'");
}

Eigen::MatrixXd g_matrix(MethodTag tag, const SummingMatrix& s) {
    switch (tag) {
        case MethodTag::bu: return ju_decompose(s).j;
        case MethodTag::ols: {
            const auto llt = checked_cholesky(s.s.transpose() * s.s, "S'S");
            return llt.solve(s.s.transpose());
        }
        case MethodTag::wls:
        case MethodTag::mint:
            throw std::invalid_argument(to_string(tag) + " requires a covariance estimate");
    }
    throw std::invalid_argument("unknown method");
}

Eigen::MatrixXd g_matrix(MethodTag tag, const SummingMatrix& s, const Eigen::MatrixXd& w) {
    if (tag == MethodTag::bu || tag == MethodTag::ols) return g_matrix(tag, s);
    check_w(s, w);
    if (tag == MethodTag::wls) {
        const Eigen::VectorXd lambda = w.diagonal();
        if (!(lambda.array() > 0.0).all() || !lambda.allFinite()) {
            throw NumericalError("WLS: covariance diagonal must be positive");
        }
        const Eigen::MatrixXd winv_s = lambda.cwiseInverse().asDiagonal() * s.s;
        return gls_projection(s, winv_s);
    }
    return mint_gstar(s, w);
}

Eigen::MatrixXd g_matrix(const ReconciliationMethod& method, const SummingMatrix& s, const CovarianceEstimate* w) {
    if (method.needs_covariance()) {
        if (w == nullptr) throw std::invalid_argument(to_string(method.tag) + " requires a covariance estimate");
        return g_matrix(method.tag, s, w->w);
    }
    return g_matrix(method.tag, s);
}

bool check_projection(const SummingMatrix& s, const Eigen::MatrixXd& g, double tol) {
    if (g.rows() != s.n || g.cols() != s.m) {
        throw std::invalid_argument("check_projection: G must be " + std::to_string(s.n) + " x " + std::to_string(s.m));
    }
    const Eigen::MatrixXd gs = g * s.s;
    const double e1 = (gs - Eigen::MatrixXd::Identity(s.n, s.n)).cwiseAbs().maxCoeff();
    const double e2 = (s.s * gs - s.s).cwiseAbs().maxCoeff();
    return e1 < tol && e2 < tol;
}

Eigen::MatrixXd mint_gstar(const SummingMatrix& s, const Eigen::MatrixXd& w) {
    check_w(s, w);
    const auto w_llt = checked_cholesky(symmetrize(w), "W");
    return gls_projection(s, w_llt.solve(s.s));
}

JUDecomposition ju_decompose(const SummingMatrix& s) {
    if (s.s.rows() != s.m || s.s.cols() != s.n || s.m < s.n || !s.s.bottomRows(s.n).isIdentity(0.0)) {
        throw std::invalid_argument("ju_decompose: S is not in bottom-last convention");
    }
    JUDecomposition out;
    out.m_star = s.m - s.n;
    out.c = s.s.topRows(out.m_star);
    out.j = Eigen::MatrixXd::Zero(s.n, s.m);
    out.j.rightCols(s.n).setIdentity();
    out.u.resize(s.m, out.m_star);
    out.u.topRows(out.m_star).setIdentity();
    out.u.bottomRows(s.n) = -out.c.transpose();
    return out;
}

Eigen::MatrixXd mint_gstar_ju(const SummingMatrix& s, const Eigen::MatrixXd& w) {
    check_w(s, w);
    const JUDecomposition ju = ju_decompose(s);
    if (ju.m_star == 0) return ju.j;
    const Eigen::MatrixXd wu = w * ju.u;
    const auto llt = checked_cholesky(symmetrize(ju.u.transpose() * wu), "U' W U");
    // J - J W U (U'WU)^-1 U'
    return ju.j - (ju.j * wu) * llt.solve(ju.u.transpose());
}

double structure_logdet_offset(const SummingMatrix& s) {
    return 0.5 * logdet(checked_cholesky(s.s.transpose() * s.s, "S'S"));
}

double expected_logscore_objective(const Eigen::MatrixXd& g, const Eigen::MatrixXd& w, const SummingMatrix& s) {
    check_w(s, w);
    if (!check_projection(s, g, kProjectionTol)) {
        throw std::invalid_argument("expected_logscore_objective: G S != I");
    }
    const auto z_llt = checked_cholesky(symmetrize(g * w * g.transpose()), "G W G'");
    const double n = s.n;
    const double k = 0.5 * n * std::log(2.0 * std::numbers::pi) + structure_logdet_offset(s);
    return k + 0.5 * n + 0.5 * logdet(z_llt);
}

ReconciledGaussian reconcile_gaussian(const Eigen::MatrixXd& g, const SummingMatrix& s, const Eigen::VectorXd& y_hat,
                                      const Eigen::MatrixXd& w) {
    check_w(s, w);
    if (y_hat.size() != s.m) {
        throw std::invalid_argument("reconcile_gaussian: base forecast must have length " + std::to_string(s.m));
    }
    if (!check_projection(s, g, kProjectionTol)) {
        throw std::invalid_argument("reconcile_gaussian: S G is not a projection onto span(S)");
    }
    ReconciledGaussian out;
    out.s = s;
    out.bottom_mean = g * y_hat;
    out.bottom_cov = symmetrize(g * w * g.transpose());
    checked_cholesky(out.bottom_cov, "reconciled covariance G W G'");
    out.full_mean = s.s * out.bottom_mean;
    return out;
}

Eigen::VectorXd marginal_variances(const ReconciledGaussian& r) {
    return ((r.s.s * r.bottom_cov).array() * r.s.s.array()).rowwise().sum();
}

}  // namespace gaussrec
