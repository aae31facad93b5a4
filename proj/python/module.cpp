#include "gaussrec/covariance.hpp"
#include "gaussrec/hierarchy.hpp"
#include "gaussrec/linalg.hpp"
#include "gaussrec/models.hpp"
#include "gaussrec/reconcile.hpp"
#include "gaussrec/scoring.hpp"
#include "gaussrec/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gaussrec;

namespace {

SummingMatrix summing(const std::vector<std::string>& labels, const std::vector<int>& levels) {
    return build_summing_matrix(HierarchySpec{labels, levels});
}

py::dict reconcile_dict(const std::string& method, const Eigen::MatrixXd& s_dense, const Eigen::VectorXd& y_hat,
                        const Eigen::MatrixXd& w) {
    const SummingMatrix s = summing_matrix_from_dense(s_dense);
    const Eigen::MatrixXd g = g_matrix(parse_method_tag(method), s, w);
    const ReconciledGaussian r = reconcile_gaussian(g, s, y_hat, w);
    py::dict out;
    out["g"] = g;
    out["mean"] = r.full_mean;
    out["bottom_mean"] = r.bottom_mean;
    out["bottom_cov"] = r.bottom_cov;
    out["variance"] = marginal_variances(r);
    return out;
}

py::list records_list(const RunResult& result) {
    py::list out;
    for (const auto& r : result.records) {
        out.append(py::make_tuple(r.replication, r.method, r.covariance_kind, r.score_name, r.series_label, r.value));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_gaussrec, m) {
    m.doc() = "Probabilistic forecast reconciliation for Gaussian hierarchies";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "summing_matrix",
        [](const std::vector<std::string>& labels, const std::vector<int>& levels) {
            const SummingMatrix s = summing(labels, levels);
            return py::make_tuple(s.s, s.row_labels);
        },
        py::arg("bottom_labels"), py::arg("level_prefix_lengths"));

    m.def(
        "g_matrix",
        [](const std::string& method, const Eigen::MatrixXd& s, const Eigen::MatrixXd& w) {
            return g_matrix(parse_method_tag(method), summing_matrix_from_dense(s), w);
        },
        py::arg("method"), py::arg("s"), py::arg("w"));
    m.def("reconcile", &reconcile_dict, py::arg("method"), py::arg("s"), py::arg("base_forecast"), py::arg("w"));

    m.def("sample_cov", [](const Eigen::MatrixXd& e) { return sample_cov(e).w; }, py::arg("residuals"));
    m.def(
        "shrink_cov",
        [](const Eigen::MatrixXd& e) {
            const auto est = shrink_cov(e);
            return py::make_tuple(est.w, *est.shrink_lambda);
        },
        py::arg("residuals"));

    m.def(
        "fit_arma",
        [](const std::vector<double>& y, int max_p, int max_q) {
            const ArmaModel a = fit_arma(y, max_p, max_q);
            py::dict out;
            out["p"] = a.p;
            out["q"] = a.q;
            out["ar"] = a.ar_coeffs;
            out["ma"] = a.ma_coeffs;
            out["mean"] = a.mean;
            out["sigma2"] = a.sigma2;
            out["aicc"] = a.aicc;
            out["forecast"] = forecast(a, y, 1)[0];
            return out;
        },
        py::arg("series"), py::arg("max_p") = 3, py::arg("max_q") = 3);

    m.def("crps_gaussian", &crps_gaussian, py::arg("mean"), py::arg("sd"), py::arg("z"));
    m.def(
        "crps_empirical", [](const std::vector<double>& x, double z) { return crps_empirical(x, z); }, py::arg("samples"),
        py::arg("z"));
    m.def("interval_score", &interval_score, py::arg("lower"), py::arg("upper"), py::arg("alpha"), py::arg("z"));
    m.def(
        "logscore",
        [](const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, const Eigen::VectorXd& z) {
            return logscore({mean, cov}, z);
        },
        py::arg("mean"), py::arg("cov"), py::arg("z"));
    m.def(
        "energy_score", [](const Eigen::MatrixXd& draws, const Eigen::VectorXd& z) { return energy_score({draws, 0}, z); },
        py::arg("draws"), py::arg("z"));
    m.def(
        "variogram_score",
        [](const Eigen::MatrixXd& draws, const Eigen::VectorXd& z, double p) { return variogram_score({draws, 0}, z, p); },
        py::arg("draws"), py::arg("z"), py::arg("p") = 0.5);

    m.def(
        "run_setup1",
        [](double rho, int t_len, int reps, std::uint64_t seed, int threads) {
            Setup1Config cfg;
            cfg.rho = rho;
            cfg.t_len = t_len;
            cfg.reps = reps;
            cfg.seed = seed;
            ReplicationOptions options;
            options.methods = default_simulation_methods();
            options.threads = threads;
            py::gil_scoped_release release;
            RunResult result = run_replications(cfg, options);
            py::gil_scoped_acquire acquire;
            return records_list(result);
        },
        py::arg("rho") = 0.0, py::arg("t_len") = 501, py::arg("reps") = 10, py::arg("seed") = 1, py::arg("threads") = 1);
}
