#include "gaussrec/models.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gaussrec {

namespace {

constexpr int kMinLength = 20;
constexpr int kMaxOrder = 5;
constexpr double kRootLimit = 1.0 / 1.01;

struct Params {
    double mean = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
};

int param_count(const Params& par) { return 1 + static_cast<int>(par.ar.size() + par.ma.size()); }

Eigen::VectorXd pack(const Params& par) {
    Eigen::VectorXd v(param_count(par));
    v(0) = par.mean;
    for (std::size_t i = 0; i < par.ar.size(); ++i) v(1 + static_cast<Eigen::Index>(i)) = par.ar[i];
    for (std::size_t j = 0; j < par.ma.size(); ++j)
        v(1 + static_cast<Eigen::Index>(par.ar.size() + j)) = par.ma[j];
    return v;
}

Params unpack(const Eigen::VectorXd& v, int p, int q) {
    Params par;
    par.mean = v(0);
    par.ar.assign(v.data() + 1, v.data() + 1 + p);
    par.ma.assign(v.data() + 1 + p, v.data() + 1 + p + q);
    return par;
}

/// Residual recursion with pre-sample deviations and innovations at zero.
std::vector<double> residuals_of(const Params& par, std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t p = par.ar.size();
    const std::size_t q = par.ma.size();
    std::vector<double> x(n), e(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = y[t] - par.mean;
    for (std::size_t t = 0; t < n; ++t) {
        double v = x[t];
        for (std::size_t i = 1; i <= p && i <= t; ++i) v -= par.ar[i - 1] * x[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) v -= par.ma[j - 1] * e[t - j];
        e[t] = v;
    }
    return e;
}

/// Residuals and their analytic Jacobian over rows [start, n).
void residuals_and_jacobian(const Params& par, std::span<const double> y, std::size_t start, Eigen::VectorXd& r,
                            Eigen::MatrixXd& jac) {
    const std::size_t n = y.size();
    const std::size_t p = par.ar.size();
    const std::size_t q = par.ma.size();
    const std::size_t k = 1 + p + q;
    std::vector<double> x(n), e(n);
    // d[t * k + c] = d e_t / d param_c
    std::vector<double> d(n * k, 0.0);
    for (std::size_t t = 0; t < n; ++t) x[t] = y[t] - par.mean;
    for (std::size_t t = 0; t < n; ++t) {
        double v = x[t];
        double dmean = -1.0;
        for (std::size_t i = 1; i <= p && i <= t; ++i) {
            v -= par.ar[i - 1] * x[t - i];
            dmean += par.ar[i - 1];
            d[t * k + i] = -x[t - i];
        }
        d[t * k] = dmean;
        for (std::size_t j = 1; j <= q && j <= t; ++j) {
            v -= par.ma[j - 1] * e[t - j];
            d[t * k + p + j] = -e[t - j];
        }
        for (std::size_t j = 1; j <= q && j <= t; ++j) {
            const double th = par.ma[j - 1];
            for (std::size_t c = 0; c < k; ++c) d[t * k + c] -= th * d[(t - j) * k + c];
        }
        e[t] = v;
    }
    const auto rows = static_cast<Eigen::Index>(n - start);
    r.resize(rows);
    jac.resize(rows, static_cast<Eigen::Index>(k));
    for (std::size_t t = start; t < n; ++t) {
        const auto row = static_cast<Eigen::Index>(t - start);
        r(row) = e[t];
        for (std::size_t c = 0; c < k; ++c) jac(row, static_cast<Eigen::Index>(c)) = d[t * k + c];
    }
}

double css(const Params& par, std::span<const double> y, std::size_t start) {
    const auto e = residuals_of(par, y);
    double acc = 0.0;
    for (std::size_t t = start; t < e.size(); ++t) acc += e[t] * e[t];
    return acc;
}

bool admissible(const Params& par, double tol) {
    return max_inverse_root_modulus(par.ar, -1) <= 1.0 - tol && max_inverse_root_modulus(par.ma, +1) <= 1.0 - tol;
}

/// Levinson-Durbin on sample autocovariances.
std::vector<double> yule_walker(std::span<const double> y, int p) {
    if (p == 0) return {};
    const std::size_t n = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> gamma(static_cast<std::size_t>(p) + 1, 0.0);
    for (int lag = 0; lag <= p; ++lag) {
        double acc = 0.0;
        for (std::size_t t = static_cast<std::size_t>(lag); t < n; ++t)
            acc += (y[t] - mean) * (y[t - static_cast<std::size_t>(lag)] - mean);
        gamma[static_cast<std::size_t>(lag)] = acc / static_cast<double>(n);
    }
    if (gamma[0] <= 0.0) return std::vector<double>(static_cast<std::size_t>(p), 0.0);
    std::vector<double> phi(static_cast<std::size_t>(p), 0.0), prev;
    double err = gamma[0];
    for (int order = 1; order <= p; ++order) {
        double acc = gamma[static_cast<std::size_t>(order)];
        for (int j = 1; j < order; ++j)
            acc -= phi[static_cast<std::size_t>(j - 1)] * gamma[static_cast<std::size_t>(order - j)];
        const double kappa = acc / err;
        prev = phi;
        phi[static_cast<std::size_t>(order - 1)] = kappa;
        for (int j = 1; j < order; ++j)
            phi[static_cast<std::size_t>(j - 1)] =
                prev[static_cast<std::size_t>(j - 1)] - kappa * prev[static_cast<std::size_t>(order - j - 1)];
        err *= (1.0 - kappa * kappa);
        if (err <= 0.0) break;
    }
    return phi;
}

void check_series(std::span<const double> series) {
    if (static_cast<int>(series.size()) < kMinLength) {
        throw std::invalid_argument("ARMA fit needs at least " + std::to_string(kMinLength) + " observations, got " +
                                    std::to_string(series.size()));
    }
    double mean = 0.0;
    for (double v : series) {
        if (!std::isfinite(v)) throw std::invalid_argument("series contains non-finite values");
        mean += v;
    }
    mean /= static_cast<double>(series.size());
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(series.size());
    if (var <= 1e-14 * (1.0 + mean * mean)) {
        throw std::invalid_argument("series has (numerically) zero variance");
    }
}

ArmaModel fit_order_unchecked(std::span<const double> y, int p, int q, const ArmaFitOptions& options) {
    const std::size_t start = static_cast<std::size_t>(options.condition_on < 0 ? p : std::max(options.condition_on, p));
    const auto n_eff = static_cast<int>(y.size() - start);
    const int k = p + q + 2;
    if (n_eff - k - 1 <= 0) {
        throw std::runtime_error("too few observations for ARMA(" + std::to_string(p) + "," + std::to_string(q) + ")");
    }

    Params par;
    for (double v : y) par.mean += v;
    par.mean /= static_cast<double>(y.size());
    par.ar = yule_walker(y, p);
    par.ma.assign(static_cast<std::size_t>(q), 0.0);
    if (!admissible(par, 1e-6)) {
        std::fill(par.ar.begin(), par.ar.end(), 0.0);
    }

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    double sse = css(par, y, start);
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        residuals_and_jacobian(par, y, start, r, jac);
        const Eigen::VectorXd grad = jac.transpose() * r;
        if (grad.cwiseAbs().maxCoeff() <= options.gradient_tolerance * std::max(1.0, sse)) break;
        const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
        if (!step.allFinite()) break;
        const Eigen::VectorXd theta = pack(par);
        bool improved = false;
        double scale = 1.0;
        for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
            Params trial = unpack(theta + scale * step, p, q);
            if (!admissible(trial, 1e-6)) continue;
            const double trial_sse = css(trial, y, start);
            if (trial_sse < sse) {
                const double rel = (sse - trial_sse) / std::max(sse, std::numeric_limits<double>::min());
                par = std::move(trial);
                sse = trial_sse;
                improved = rel > 1e-15;
                break;
            }
        }
        if (!improved) break;
    }

    if (!admissible(par, 1e-6)) {
        throw std::runtime_error("ARMA(" + std::to_string(p) + "," + std::to_string(q) + ") fit is non-stationary");
    }
    ArmaModel model;
    model.p = p;
    model.q = q;
    model.include_mean = true;
    model.ar_coeffs = par.ar;
    model.ma_coeffs = par.ma;
    model.mean = par.mean;
    model.n_obs = static_cast<int>(y.size());
    model.n_effective = n_eff;
    model.sigma2 = sse / n_eff;
    model.iterations = iter;
    if (!(model.sigma2 > 0.0) || !std::isfinite(model.sigma2)) {
        throw std::runtime_error("degenerate innovation variance");
    }
    model.loglik = -0.5 * n_eff * (std::log(2.0 * std::numbers::pi * model.sigma2) + 1.0);
    model.aicc = -2.0 * model.loglik + 2.0 * k + 2.0 * k * (k + 1.0) / (n_eff - k - 1.0);
    return model;
}

}  // namespace

double max_inverse_root_modulus(std::span<const double> coeffs, int sign) {
    std::size_t k = coeffs.size();
    while (k > 0 && coeffs[k - 1] == 0.0) --k;
    if (k == 0) return 0.0;
    if (k == 1) return std::abs(coeffs[0]);
    const double a1 = -sign * coeffs[0];
    if (k == 2) {
        // Roots of z^2 - a1 z - a2.
        const double a2 = -sign * coeffs[1];
        const double disc = a1 * a1 + 4.0 * a2;
        if (disc < 0.0) return std::sqrt(-a2);
        const double r = std::sqrt(disc);
        return 0.5 * std::max(std::abs(a1 + r), std::abs(a1 - r));
    }
    // Companion matrix of z^k - a_1 z^{k-1} - ... - a_k with a = -sign * c.
    using Companion = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxOrder, kMaxOrder>;
    const auto dim = static_cast<Eigen::Index>(k);
    Companion companion = Companion::Zero(dim, dim);
    for (std::size_t i = 0; i < k; ++i) companion(0, static_cast<Eigen::Index>(i)) = -sign * coeffs[i];
    for (Eigen::Index i = 1; i < dim; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Companion> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stationary(const ArmaModel& model, double tol) {
    return max_inverse_root_modulus(model.ar_coeffs, -1) <= 1.0 - tol;
}

bool is_invertible(const ArmaModel& model, double tol) {
    return max_inverse_root_modulus(model.ma_coeffs, +1) <= 1.0 - tol;
}

ArmaModel fit_arma_order(std::span<const double> series, int p, int q, const ArmaFitOptions& options) {
    check_series(series);
    if (p < 0 || q < 0 || p > kMaxOrder || q > kMaxOrder) {
        throw std::invalid_argument("ARMA orders must lie in [0, 5]");
    }
    return fit_order_unchecked(series, p, q, options);
}

ArmaSelection select_arma(std::span<const double> series, int max_p, int max_q) {
    check_series(series);
    if (max_p < 0 || max_q < 0 || max_p > kMaxOrder || max_q > kMaxOrder) {
        throw std::invalid_argument("max_p and max_q must lie in [0, 5]");
    }
    ArmaSelection selection;
    ArmaFitOptions options;
    options.condition_on = max_p;
    const ArmaModel* best = nullptr;
    for (int p = 0; p <= max_p; ++p) {
        for (int q = 0; q <= max_q; ++q) {
            try {
                ArmaModel m = fit_order_unchecked(series, p, q, options);
                // Roots this close to the unit circle come from cancelling AR/MA factors
                // chasing sample noise; such candidates are dropped from the comparison.
                if (max_inverse_root_modulus(m.ar_coeffs, -1) > kRootLimit ||
                    max_inverse_root_modulus(m.ma_coeffs, +1) > kRootLimit) {
                    selection.rejected.emplace_back(p, q);
                    continue;
                }
                selection.candidates.push_back(std::move(m));
            } catch (const std::runtime_error&) {
                selection.rejected.emplace_back(p, q);
            }
        }
    }
    for (const auto& candidate : selection.candidates) {
        if (best == nullptr || candidate.aicc < best->aicc) best = &candidate;
    }
    if (best == nullptr) {
        throw std::runtime_error("no admissible (stationary) ARMA candidate");
    }
    selection.best = *best;
    return selection;
}

ArmaModel fit_arma(std::span<const double> series, int max_p, int max_q) {
    return select_arma(series, max_p, max_q).best;
}

std::vector<double> insample_residuals(const ArmaModel& model, std::span<const double> series) {
    if (static_cast<int>(series.size()) != model.n_obs) {
        throw std::invalid_argument("insample_residuals: series length " + std::to_string(series.size()) +
                                    " does not match the fitted length " + std::to_string(model.n_obs));
    }
    return residuals_of({model.mean, model.ar_coeffs, model.ma_coeffs}, series);
}

std::vector<double> forecast(const ArmaModel& model, std::span<const double> series, int h) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    const std::size_t n = series.size();
    const auto e = residuals_of({model.mean, model.ar_coeffs, model.ma_coeffs}, series);
    std::vector<double> x(n + static_cast<std::size_t>(h));
    std::vector<double> eps(n + static_cast<std::size_t>(h), 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = series[t] - model.mean;
        eps[t] = e[t];
    }
    std::vector<double> out(static_cast<std::size_t>(h));
    for (std::size_t t = n; t < n + static_cast<std::size_t>(h); ++t) {
        double v = 0.0;
        for (std::size_t i = 1; i <= model.ar_coeffs.size() && i <= t; ++i) v += model.ar_coeffs[i - 1] * x[t - i];
        for (std::size_t j = 1; j <= model.ma_coeffs.size() && j <= t; ++j) v += model.ma_coeffs[j - 1] * eps[t - j];
        x[t] = v;
        out[t - n] = model.mean + v;
    }
    return out;
}

std::string Differencing::to_string() const {
    switch (kind) {
        case Kind::none: return "none";
        case Kind::first: return "first";
        case Kind::seasonal: return "seasonal:" + std::to_string(period);
    }
    return "none";
}

Differencing Differencing::parse(const std::string& text) {
    if (text == "none") return {};
    if (text == "first") return {Kind::first, 1};
    const std::string prefix = "seasonal:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string rest = text.substr(prefix.size());
        std::size_t used = 0;
        int period = 0;
        try {
            period = std::stoi(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == rest.size() && period >= 1) return {Kind::seasonal, period};
    }
    throw std::invalid_argument("unknown differencing '" + text + "' (expected none, first or seasonal:<period>)");
}

std::vector<double> apply_differencing(std::span<const double> series, const Differencing& d) {
    const auto lag = static_cast<std::size_t>(d.lag());
    if (lag == 0) return {series.begin(), series.end()};
    if (series.size() <= lag) throw std::invalid_argument("series too short to difference");
    std::vector<double> out(series.size() - lag);
    for (std::size_t t = lag; t < series.size(); ++t) out[t - lag] = series[t] - series[t - lag];
    return out;
}

BaseForecastSet base_forecast_all(const Eigen::MatrixXd& panel, int h, const BaseForecastOptions& options,
                                  const std::vector<std::string>& labels) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    const auto cols = panel.cols();
    const auto rows = panel.rows();
    const auto lag = static_cast<Eigen::Index>(options.differencing.lag());
    if (cols == 0) throw std::invalid_argument("panel has no columns");
    if (rows <= lag) throw std::invalid_argument("panel too short for the requested differencing");

    BaseForecastSet out;
    out.h = h;
    out.point.resize(cols);
    out.path.resize(h, cols);
    out.models.reserve(static_cast<std::size_t>(cols));
    std::vector<std::vector<double>> resid(static_cast<std::size_t>(cols));
    int burn = 0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        const std::string name =
            static_cast<std::size_t>(c) < labels.size() ? labels[static_cast<std::size_t>(c)] : std::to_string(c);
        std::vector<double> y(static_cast<std::size_t>(rows));
        for (Eigen::Index t = 0; t < rows; ++t) y[static_cast<std::size_t>(t)] = panel(t, c);
        try {
            const auto x = apply_differencing(y, options.differencing);
            ArmaModel model = fit_arma(x, options.max_p, options.max_q);
            const auto fc = forecast(model, x, h);
            // Integrate back: y_{T+k} = y_{T+k-lag} + fc_k.
            std::vector<double> extended = y;
            for (int k = 0; k < h; ++k) {
                double v = fc[static_cast<std::size_t>(k)];
                if (lag > 0) v += extended[extended.size() - static_cast<std::size_t>(lag)];
                extended.push_back(v);
                out.path(k, c) = v;
            }
            out.point(c) = out.path(h - 1, c);
            resid[static_cast<std::size_t>(c)] = insample_residuals(model, x);
            burn = std::max(burn, model.burn_in());
            out.models.push_back(std::move(model));
        } catch (const std::exception& err) {
            throw std::runtime_error("series '" + name + "': " + err.what());
        }
    }
    const auto n_resid = static_cast<Eigen::Index>(resid.front().size());
    out.residuals.resize(n_resid - burn, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index t = burn; t < n_resid; ++t) {
            out.residuals(t - burn, c) = resid[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
        }
    }
    return out;
}

}  // namespace gaussrec
