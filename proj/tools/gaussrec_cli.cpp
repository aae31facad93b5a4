#include "gaussrec/covariance.hpp"
#include "gaussrec/evaluate.hpp"
#include "gaussrec/hierarchy.hpp"
#include "gaussrec/parallel.hpp"
#include "gaussrec/reconcile.hpp"
#include "gaussrec/records.hpp"
#include "gaussrec/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gaussrec;

namespace {

struct CommonArgs {
    std::string out = "out";
    std::uint64_t seed = 1;
    std::string cov = "both";
    std::string methods = "base,bu,ols,wls,mint";
    int max_p = 3;
    int max_q = 3;
    int threads = 0;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        field.erase(0, field.find_first_not_of(" \t\r"));
        field.erase(field.find_last_not_of(" \t\r") + 1);
        out.push_back(field);
    }
    return out;
}

double parse_number(const std::string& cell, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != cell.size()) throw std::invalid_argument(what + ": non-numeric value '" + cell + "'");
    return v;
}

std::vector<MethodSpec> with_baseline(std::vector<MethodSpec> methods) {
    const MethodSpec baseline{"BU", CovarianceKind::sample};
    if (std::find(methods.begin(), methods.end(), baseline) == methods.end()) methods.insert(methods.begin(), baseline);
    return methods;
}

int resolve_threads(int requested) { return requested > 0 ? requested : default_thread_count(); }

/// records.csv, failures.csv, table.csv and the univariate score files.
void write_reports(const RunResult& run, const SummingMatrix& s, const fs::path& out, nlohmann::json meta) {
    fs::create_directories(out);
    write_records(run.records, out / "records.csv");
    write_failures(run.failures, out / "failures.csv");
    std::vector<ImprovementRow> rows;
    if (!run.records.empty()) rows = relative_improvement(run.records);
    write_multivariate_table(rows, out / "table.csv");
    write_improvements(rows, out / "improvements.csv");
    write_univariate_tables(rows, s.row_labels, out);
    if (!run.records.empty()) write_mse_table(mse_table(run.records, s), out / "mse_table.csv");
    std::ofstream(out / "summary.txt") << summarize(rows);
    meta["records"] = run.records.size();
    meta["failures"] = run.failures.size();
    std::ofstream(out / "metadata.json") << meta.dump(2) << '\n';
}

ReplicationOptions replication_options(const CommonArgs& a) {
    ReplicationOptions options;
    options.methods = with_baseline(make_methods(split_list(a.methods), parse_kind_selection(a.cov)));
    options.max_p = a.max_p;
    options.max_q = a.max_q;
    options.threads = resolve_threads(a.threads);
    return options;
}

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", a.seed, "Master seed")->capture_default_str();
    cmd->add_option("--cov", a.cov, "sample, shrink or both")->capture_default_str();
    cmd->add_option("--methods", a.methods, "Comma-separated methods")->capture_default_str();
    cmd->add_option("--max-p", a.max_p, "Largest AR order")->capture_default_str();
    cmd->add_option("--max-q", a.max_q, "Largest MA order")->capture_default_str();
    cmd->add_option("--threads", a.threads, "Worker threads (default RECON_THREADS or hardware)");
}

/// Point forecasts and marginal variances of every window, one row per series.
void write_forecasts(const EvaluationResult& result, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "window,target,method,covariance_kind,series_label,forecast,variance,realized\n";
    for (std::size_t w = 0; w < result.windows.size(); ++w) {
        const WindowResult& wr = result.windows[w];
        for (std::size_t k = 0; k < wr.methods.size(); ++k) {
            if (wr.point_forecasts[k].size() == 0) continue;
            for (Eigen::Index i = 0; i < result.s.m; ++i) {
                out << w << ',' << wr.target << ',' << wr.methods[k].name << ',' << wr.methods[k].kind_name() << ','
                    << result.s.row_labels[static_cast<std::size_t>(i)] << ','
                    << format_double(wr.point_forecasts[k](i)) << ',' << format_double(wr.marginal_variances[k](i))
                    << ',' << format_double(wr.realized(i)) << '\n';
            }
        }
    }
}

int run_reconcile(const std::string& hierarchy_path, const std::string& base_path, const std::string& resid_path,
                  const std::string& method_name, const std::string& cov_name, const fs::path& out) {
    const SummingMatrix s = build_summing_matrix(read_hierarchy_spec(hierarchy_path));
    std::map<std::string, Eigen::Index> row_of;
    for (Eigen::Index i = 0; i < s.m; ++i) row_of[s.row_labels[static_cast<std::size_t>(i)]] = i;

    Eigen::VectorXd y_hat = Eigen::VectorXd::Constant(s.m, std::numeric_limits<double>::quiet_NaN());
    {
        std::ifstream in(base_path);
        if (!in) throw std::runtime_error("cannot open " + base_path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto f = split_csv_line(line);
            if (f.size() != 2) throw std::invalid_argument("base forecast rows must be 'series,forecast'");
            const auto it = row_of.find(f[0]);
            if (it == row_of.end()) throw std::invalid_argument("unknown series '" + f[0] + "' in base forecasts");
            y_hat(it->second) = parse_number(f[1], "base forecast");
        }
    }
    for (Eigen::Index i = 0; i < s.m; ++i)
        if (std::isnan(y_hat(i)))
            throw std::invalid_argument("no base forecast for series '" + s.row_labels[static_cast<std::size_t>(i)] + "'");

    std::vector<std::vector<double>> rows;
    std::vector<Eigen::Index> col_to_row;
    {
        std::ifstream in(resid_path);
        if (!in) throw std::runtime_error("cannot open " + resid_path);
        std::string line;
        if (!std::getline(in, line)) throw std::invalid_argument("residual file is empty");
        for (const auto& label : split_csv_line(line)) {
            const auto it = row_of.find(label);
            if (it == row_of.end()) throw std::invalid_argument("unknown series '" + label + "' in residuals");
            col_to_row.push_back(it->second);
        }
        if (static_cast<Eigen::Index>(col_to_row.size()) != s.m)
            throw std::invalid_argument("residual file must have one column per series");
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto f = split_csv_line(line);
            if (f.size() != col_to_row.size()) throw std::invalid_argument("ragged residual row");
            std::vector<double> r(f.size());
            for (std::size_t c = 0; c < f.size(); ++c) r[c] = parse_number(f[c], "residual");
            rows.push_back(std::move(r));
        }
    }
    Eigen::MatrixXd resid(static_cast<Eigen::Index>(rows.size()), s.m);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t c = 0; c < col_to_row.size(); ++c)
            resid(static_cast<Eigen::Index>(t), col_to_row[c]) = rows[t][c];

    const auto kind = parse_covariance_kind(cov_name);
    const CovarianceEstimate w = kind == CovarianceKind::sample ? sample_cov(resid) : shrink_cov(resid);
    const ReconciliationMethod method{parse_method_tag(method_name), kind};
    const Eigen::MatrixXd g = g_matrix(method, s, &w);
    const ReconciledGaussian r = reconcile_gaussian(g, s, y_hat, w.w);
    const Eigen::VectorXd var = marginal_variances(r);

    fs::create_directories(out);
    std::ofstream mean_out(out / "reconciled_mean.csv");
    mean_out << "series,mean,variance\n";
    for (Eigen::Index i = 0; i < s.m; ++i)
        mean_out << s.row_labels[static_cast<std::size_t>(i)] << ',' << format_double(r.full_mean(i)) << ','
                 << format_double(var(i)) << '\n';
    std::ofstream cov_out(out / "bottom_cov.csv");
    cov_out << "series";
    for (Eigen::Index j = 0; j < s.n; ++j) cov_out << ',' << s.row_labels[static_cast<std::size_t>(s.m_star() + j)];
    cov_out << '\n';
    for (Eigen::Index i = 0; i < s.n; ++i) {
        cov_out << s.row_labels[static_cast<std::size_t>(s.m_star() + i)];
        for (Eigen::Index j = 0; j < s.n; ++j) cov_out << ',' << format_double(r.bottom_cov(i, j));
        cov_out << '\n';
    }
    std::cout << "reconciled " << s.m << " series with " << to_string(method.tag) << " (" << to_string(kind) << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian probabilistic forecast reconciliation"};
    app.require_subcommand(1);

    CommonArgs s1_args;
    Setup1Config s1;
    auto* sim1 = app.add_subcommand("sim1", "Setup 1 simulation: four bottom series, VAR(1) pairs");
    add_common(sim1, s1_args);
    sim1->add_option("--rho", s1.rho, "Within-pair innovation correlation")->capture_default_str();
    sim1->add_option("--T", s1.t_len, "Sample length including the test point")->capture_default_str();
    sim1->add_option("--reps", s1.reps, "Replications")->capture_default_str();

    CommonArgs s2_args;
    Setup2Config s2;
    std::string corr = "nonneg";
    auto* sim2 = app.add_subcommand("sim2", "Setup 2 simulation: 36 bottom series in six groups");
    add_common(sim2, s2_args);
    sim2->add_option("--corr", corr, "nonneg or mixed")->capture_default_str();
    sim2->add_option("--T", s2.t_len, "Sample length including the test point")->capture_default_str();
    sim2->add_option("--reps", s2.reps, "Replications")->capture_default_str();

    std::string rec_hierarchy, rec_base, rec_resid, rec_method = "mint", rec_cov = "shrink", rec_out = "out";
    auto* rec = app.add_subcommand("reconcile", "Reconcile one Gaussian base forecast");
    rec->add_option("--hierarchy", rec_hierarchy, "Hierarchy spec file")->required()->check(CLI::ExistingFile);
    rec->add_option("--base", rec_base, "CSV with columns series,forecast")->required()->check(CLI::ExistingFile);
    rec->add_option("--residuals", rec_resid, "CSV of in-sample residuals, one column per series")
        ->required()
        ->check(CLI::ExistingFile);
    rec->add_option("--method", rec_method, "bu, ols, wls or mint")->capture_default_str();
    rec->add_option("--cov", rec_cov, "sample or shrink")->capture_default_str();
    rec->add_option("--out", rec_out, "Output directory")->capture_default_str();

    CommonArgs ev_args;
    ev_args.cov = "shrink";
    ev_args.methods = "base,bu,ols,wls,mint";
    std::string ev_data, ev_hierarchy, ev_mode = "sliding", ev_diff = "none";
    int ev_window = 120, ev_h = 1;
    bool allow_partial = false;
    auto* ev = app.add_subcommand("evaluate", "Rolling-window evaluation on a bottom-level panel");
    ev->set_help_flag("--help", "Print this help message and exit");
    add_common(ev, ev_args);
    ev->add_option("--data", ev_data, "Panel CSV (date column plus one column per bottom series)")
        ->required()
        ->check(CLI::ExistingFile);
    ev->add_option("--hierarchy", ev_hierarchy, "Hierarchy spec file")->required()->check(CLI::ExistingFile);
    ev->add_option("--window", ev_window, "Training window length")->capture_default_str();
    ev->add_option("--h", ev_h, "Forecast horizon")->capture_default_str();
    ev->add_option("--window-mode", ev_mode, "sliding or expanding")->capture_default_str();
    ev->add_option("--difference", ev_diff, "none, first or seasonal:<period>")->capture_default_str();
    ev->add_flag("--allow-partial", allow_partial, "Exit 0 even when some windows failed");

    std::string syn_out = "data";
    std::uint64_t syn_seed = 2019;
    int syn_months = 264;
    auto* syn = app.add_subcommand("synth-tourism", "Write the synthetic tourism-shaped panel and hierarchy");
    syn->add_option("--out", syn_out, "Output directory")->capture_default_str();
    syn->add_option("--seed", syn_seed, "Generator seed")->capture_default_str();
    syn->add_option("--months", syn_months, "Number of months")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim1) {
            s1.seed = s1_args.seed;
            s1.validate();
            if (s1.off_grid()) std::cerr << "warning: rho " << s1.rho << " is outside the published grid\n";
            const auto options = replication_options(s1_args);
            const RunResult run = run_replications(s1, options);
            write_reports(run, build_summing_matrix(setup1_hierarchy()), s1_args.out,
                          {{"command", "sim1"}, {"rho", s1.rho}, {"T", s1.t_len}, {"reps", s1.reps},
                           {"seed", s1.seed}, {"cov", s1_args.cov}, {"max_p", s1_args.max_p}, {"max_q", s1_args.max_q}});
            std::cout << "sim1: " << run.records.size() << " records, " << run.failures.size() << " failures -> "
                      << s1_args.out << '\n';
        } else if (*sim2) {
            s2.seed = s2_args.seed;
            s2.correlation_mode = parse_correlation_mode(corr);
            s2.validate();
            const auto options = replication_options(s2_args);
            const RunResult run = run_replications(s2, options);
            write_reports(run, build_summing_matrix(setup2_hierarchy()), s2_args.out,
                          {{"command", "sim2"}, {"corr", to_string(s2.correlation_mode)}, {"T", s2.t_len},
                           {"reps", s2.reps}, {"seed", s2.seed}, {"cov", s2_args.cov},
                           {"max_p", s2_args.max_p}, {"max_q", s2_args.max_q}});
            std::cout << "sim2: " << run.records.size() << " records, " << run.failures.size() << " failures -> "
                      << s2_args.out << '\n';
        } else if (*rec) {
            return run_reconcile(rec_hierarchy, rec_base, rec_resid, rec_method, rec_cov, rec_out);
        } else if (*ev) {
            const PanelData panel = load_panel(ev_data, ev_hierarchy);
            EvaluationOptions options;
            options.initial_window = ev_window;
            options.h = ev_h;
            options.window_mode = parse_window_mode(ev_mode);
            options.methods = with_baseline(make_methods(split_list(ev_args.methods), parse_kind_selection(ev_args.cov)));
            options.scores = application_score_options();
            options.base.max_p = ev_args.max_p;
            options.base.max_q = ev_args.max_q;
            options.base.differencing = Differencing::parse(ev_diff);
            options.seed = ev_args.seed;
            options.threads = resolve_threads(ev_args.threads);
            const EvaluationResult result = rolling_evaluate(panel, options);
            write_reports(result.run, result.s, ev_args.out,
                          {{"command", "evaluate"}, {"data", ev_data}, {"window", ev_window}, {"h", ev_h},
                           {"window_mode", to_string(options.window_mode)},
                           {"difference", options.base.differencing.to_string()}, {"seed", ev_args.seed},
                           {"cov", ev_args.cov}, {"windows", result.windows.size()},
                           {"covariance_horizon", "1-step residual covariance used for every h"}});
            write_forecasts(result, fs::path(ev_args.out) / "forecasts.csv");
            std::cout << "evaluate: " << result.windows.size() << " windows, " << result.run.failures.size()
                      << " failures -> " << ev_args.out << '\n';
            if (!result.run.failures.empty() && !allow_partial) {
                std::cerr << "some windows failed; see failures.csv (use --allow-partial to accept)\n";
                return 3;
            }
        } else if (*syn) {
            fs::create_directories(syn_out);
            const PanelData panel = synthetic_tourism_panel(syn_seed, syn_months);
            write_panel(panel, fs::path(syn_out) / "tourism_synthetic.csv");
            write_hierarchy_spec(panel.spec, fs::path(syn_out) / "tourism_hierarchy.txt");
            std::cout << "wrote " << panel.values.rows() << " months x " << panel.values.cols() << " regions to "
                      << syn_out << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
