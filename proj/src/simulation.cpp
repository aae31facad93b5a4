#include "gaussrec/simulation.hpp"

#include "gaussrec/linalg.hpp"
#include "gaussrec/models.hpp"
#include "gaussrec/parallel.hpp"
#include "gaussrec/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace gaussrec {

namespace {

constexpr int kBurnIn = 200;
constexpr int kGroups = 6;
constexpr int kGroupSize = 6;

// Stream purposes under one master seed.
enum Purpose : std::uint64_t { kPanel = 1, kCoefficients = 2, kCorrelation = 3, kScoring = 4 };

Eigen::Matrix2d rotation(double radius, double angle) {
    Eigen::Matrix2d a;
    a << radius * std::cos(angle), -radius * std::sin(angle), radius * std::sin(angle), radius * std::cos(angle);
    return a;
}

Eigen::MatrixXd simulate_var1(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma, int t_len, CounterRng& rng) {
    const auto llt = checked_cholesky(sigma, "innovation covariance");
    const Eigen::MatrixXd l = llt.matrixL();
    const Eigen::Index d = a.rows();
    Eigen::VectorXd state = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd xi(d);
    Eigen::MatrixXd panel(t_len, d);
    for (int t = -kBurnIn; t < t_len; ++t) {
        for (Eigen::Index j = 0; j < d; ++j) xi(j) = rng.normal();
        state = a * state + l * xi;
        if (t >= 0) panel.row(t) = state.transpose();
    }
    return panel;
}

Eigen::MatrixXd nearest_pd_correlation_preserving(const Eigen::MatrixXd& cov) {
    const Eigen::VectorXd diag = cov.diagonal();
    Eigen::MatrixXd current = cov;
    for (int attempt = 0; attempt < 10; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(current);
        if (llt.info() == Eigen::Success && min_pivot(llt) > 1e-12 * current.trace() / current.rows()) return current;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(current);
        const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(1e-6);
        Eigen::MatrixXd repaired = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
        const Eigen::VectorXd scale = (diag.array() / repaired.diagonal().array()).sqrt();
        current = symmetrize(scale.asDiagonal() * repaired * scale.asDiagonal());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(current);
    if (llt.info() == Eigen::Success) return current;
    throw NumericalError("could not repair the mixed-sign innovation covariance");
}

using PanelGenerator = std::function<Eigen::MatrixXd(int)>;

RunResult run_generic(const SummingMatrix& s, const PanelGenerator& generate, int reps, std::uint64_t seed,
                      const ReplicationOptions& options) {
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    if (options.methods.empty()) throw std::invalid_argument("no methods requested");
    std::vector<RunResult> per_rep(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), options.threads, [&](std::size_t idx) {
        const int rep = static_cast<int>(idx);
        RunResult& slot = per_rep[idx];
        ForecastCase fc;
        fc.s = &s;
        try {
            const Eigen::MatrixXd bottom = generate(rep);
            const Eigen::MatrixXd full = aggregate_panel(s, bottom);
            const Eigen::Index t_train = full.rows() - 1;
            const BaseForecastSet base =
                base_forecast_all(full.topRows(t_train), 1, {options.max_p, options.max_q, {}}, s.row_labels);
            fc.base_forecast = base.point;
            fc.realized = full.row(t_train).transpose();
            estimate_covariances(base.residuals, fc);
        } catch (const std::exception& e) {
            for (const auto& m : options.methods) slot.failures.push_back({rep, m.name, m.kind_name(), e.what()});
            return;
        }
        score_forecast(fc, options.methods, options.scores, rep, derive_stream(seed, static_cast<std::uint64_t>(rep), kScoring),
                       slot);
    });
    RunResult out;
    for (auto& r : per_rep) {
        out.records.insert(out.records.end(), std::make_move_iterator(r.records.begin()),
                           std::make_move_iterator(r.records.end()));
        out.failures.insert(out.failures.end(), r.failures.begin(), r.failures.end());
    }
    return out;
}

}  // namespace

bool Setup1Config::off_grid() const {
    const double scaled = rho * 10.0;
    return std::abs(rho) > 0.8 + 1e-12 || std::abs(scaled - std::round(scaled)) > 1e-9;
}

void Setup1Config::validate() const {
    if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (-1, 1)");
    if (t_len < 22) throw std::invalid_argument("T must be at least 22");
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
}

std::string to_string(CorrelationMode mode) { return mode == CorrelationMode::nonnegative ? "nonneg" : "mixed"; }

CorrelationMode parse_correlation_mode(const std::string& text) {
    if (text == "nonneg" || text == "nonnegative") return CorrelationMode::nonnegative;
    if (text == "mixed") return CorrelationMode::mixed;
    throw std::invalid_argument("unknown correlation mode '" + text + "' (expected nonneg or mixed)");
}

void Setup2Config::validate() const {
    if (t_len < 22) throw std::invalid_argument("T must be at least 22");
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
}

HierarchySpec setup1_hierarchy() { return {{"AA", "AB", "BA", "BB"}, {0, 1}}; }

HierarchySpec setup2_hierarchy() {
    HierarchySpec spec;
    spec.level_prefix_lengths = {0, 1};
    for (int g = 0; g < kGroups; ++g) {
        for (int k = 1; k <= kGroupSize; ++k) {
            spec.bottom_labels.push_back(std::string(1, static_cast<char>('A' + g)) + std::to_string(k));
        }
    }
    return spec;
}

std::pair<Eigen::Matrix2d, Eigen::Matrix2d> var1_coefficients_setup1() {
    return {rotation(0.6, std::numbers::pi / 3.0), rotation(0.9, std::numbers::pi / 6.0)};
}

Eigen::Matrix4d setup1_innovation_cov(double rho) {
    Eigen::Matrix2d s1;
    const double off = std::sqrt(6.0) * rho;
    s1 << 2.0, off, off, 3.0;
    Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
    sigma.topLeftCorner<2, 2>() = s1;
    sigma.bottomRightCorner<2, 2>() = s1;
    return sigma;
}

Eigen::MatrixXd var1_stationary_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma) {
    const Eigen::Index d = a.rows();
    const Eigen::Index dd = d * d;
    // vec(V) = (I - A kron A)^-1 vec(Sigma), column-major vec.
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(dd, dd);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k)
                for (Eigen::Index l = 0; l < d; ++l) system(j * d + i, l * d + k) -= a(i, k) * a(j, l);
    const Eigen::VectorXd vec_sigma = Eigen::Map<const Eigen::VectorXd>(sigma.data(), dd);
    const Eigen::VectorXd vec_v = system.partialPivLu().solve(vec_sigma);
    return symmetrize(Eigen::Map<const Eigen::MatrixXd>(vec_v.data(), d, d));
}

Eigen::MatrixXd dgp_setup1(const Setup1Config& cfg, int rep) {
    cfg.validate();
    const auto [a1, a2] = var1_coefficients_setup1();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a.topLeftCorner(2, 2) = a1;
    a.bottomRightCorner(2, 2) = a2;
    CounterRng rng(cfg.seed, derive_stream(cfg.seed, static_cast<std::uint64_t>(rep), kPanel));
    return simulate_var1(a, setup1_innovation_cov(cfg.rho), cfg.t_len, rng);
}

Eigen::MatrixXd setup2_coefficients(std::uint64_t seed) {
    CounterRng rng(seed, derive_stream(seed, 0, kCoefficients));
    const int d = kGroups * kGroupSize;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int g = 0; g < kGroups; ++g) {
        Eigen::MatrixXd block(kGroupSize, kGroupSize);
        for (int i = 0; i < kGroupSize; ++i)
            for (int j = 0; j < kGroupSize; ++j) block(i, j) = rng.normal();
        const double target = rng.uniform(0.4, 0.9);
        Eigen::EigenSolver<Eigen::MatrixXd> eig(block, false);
        const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
        a.block(g * kGroupSize, g * kGroupSize, kGroupSize, kGroupSize) = block * (target / radius);
    }
    return a;
}

Eigen::MatrixXd setup2_innovation_cov(const Setup2Config& cfg, int rep) {
    CounterRng rng(cfg.seed, derive_stream(cfg.seed, static_cast<std::uint64_t>(rep), kCorrelation));
    const int d = kGroups * kGroupSize;
    std::vector<double> within(kGroups);
    for (auto& r : within) r = rng.uniform(0.2, 0.7);
    const double between = rng.uniform(0.0, *std::min_element(within.begin(), within.end()) / 2.0);
    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(d, d, between);
    for (int g = 0; g < kGroups; ++g) {
        corr.block(g * kGroupSize, g * kGroupSize, kGroupSize, kGroupSize).setConstant(within[static_cast<std::size_t>(g)]);
    }
    corr.diagonal().setOnes();
    Eigen::VectorXd sd(d);
    for (int i = 0; i < d; ++i) sd(i) = rng.uniform(std::sqrt(2.0), std::sqrt(6.0));
    Eigen::MatrixXd cov = sd.asDiagonal() * corr * sd.asDiagonal();

    if (cfg.correlation_mode == CorrelationMode::mixed) {
        std::vector<std::pair<int, int>> pairs;
        for (int g = 0; g < kGroups; ++g)
            for (int h = g + 1; h < kGroups; ++h) pairs.emplace_back(g, h);
        for (std::size_t k = pairs.size() - 1; k > 0; --k) {
            const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k + 1));
            std::swap(pairs[k], pairs[std::min(pick, k)]);
        }
        for (std::size_t k = 0; k < pairs.size() / 2; ++k) {
            const auto [g, h] = pairs[k];
            cov.block(g * kGroupSize, h * kGroupSize, kGroupSize, kGroupSize) *= -1.0;
            cov.block(h * kGroupSize, g * kGroupSize, kGroupSize, kGroupSize) *= -1.0;
        }
        cov = nearest_pd_correlation_preserving(cov);
    }
    checked_cholesky(cov, "setup 2 innovation covariance");
    return cov;
}

Eigen::MatrixXd dgp_setup2(const Setup2Config& cfg, int rep) {
    cfg.validate();
    const Eigen::MatrixXd a = setup2_coefficients(cfg.seed);
    const Eigen::MatrixXd sigma = setup2_innovation_cov(cfg, rep);
    CounterRng rng(cfg.seed, derive_stream(cfg.seed, static_cast<std::uint64_t>(rep), kPanel));
    return simulate_var1(a, sigma, cfg.t_len, rng);
}

std::vector<MethodSpec> default_simulation_methods() {
    return make_methods({"bu", "ols", "wls", "mint", "base"}, {CovarianceKind::sample, CovarianceKind::shrinkage});
}

RunResult run_replications(const Setup1Config& cfg, const ReplicationOptions& options) {
    cfg.validate();
    const SummingMatrix s = build_summing_matrix(setup1_hierarchy());
    return run_generic(s, [&](int rep) { return dgp_setup1(cfg, rep); }, cfg.reps, cfg.seed, options);
}

RunResult run_replications(const Setup2Config& cfg, const ReplicationOptions& options) {
    cfg.validate();
    const SummingMatrix s = build_summing_matrix(setup2_hierarchy());
    return run_generic(s, [&](int rep) { return dgp_setup2(cfg, rep); }, cfg.reps, cfg.seed, options);
}

}  // namespace gaussrec
