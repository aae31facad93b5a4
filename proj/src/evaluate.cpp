#include "gaussrec/evaluate.hpp"

#include "gaussrec/parallel.hpp"
#include "gaussrec/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gaussrec {

namespace {

// Region labels of the two-level geographic hierarchy (state letter + region code).
const std::vector<std::string> kTourismRegions{
    "AAA", "AAB", "ABA", "ABB", "ACA", "ADA", "ADB", "ADC", "ADD", "AEA", "AEB", "AEC", "AED", "AFA",
    "BAA", "BAB", "BAC", "BBA", "BCA", "BCB", "BCC", "BDA", "BDB", "BDC", "BDD", "BDE", "BDF", "BEA",
    "BEB", "BEC", "BED", "BEE", "BEF", "BEG", "BEH", "CAA", "CAB", "CAC", "CBA", "CBB", "CBC", "CBD",
    "CBE", "CCA", "CCB", "CCC", "CDA", "CDB", "DAA", "DAB", "DAC", "DBA", "DBB", "DBC", "DBD", "DCA",
    "DCB", "DCC", "DDA", "DDB", "EAA", "EAB", "EAC", "EBA", "ECA", "FAA", "FBA", "FBB", "FCA", "FCB",
    "GAA", "GAB", "GAC", "GBA", "GBB", "GBC", "GBD"};

constexpr std::uint64_t kScoringPurpose = 4;

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto first = field.find_first_not_of(" \t\r\"");
        const auto last = field.find_last_not_of(" \t\r\"");
        out.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

PanelData load_panel(const std::filesystem::path& csv_path, const std::filesystem::path& hierarchy_path) {
    return load_panel(csv_path, read_hierarchy_spec(hierarchy_path));
}

PanelData load_panel(const std::filesystem::path& csv_path, const HierarchySpec& spec) {
    spec.validate();
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open data file " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("data file is empty");
    const auto header = split_fields(line);
    std::map<std::string, std::size_t> column_of;
    for (std::size_t c = 1; c < header.size(); ++c) column_of[header[c]] = c;
    std::vector<std::size_t> source;
    for (const auto& label : spec.bottom_labels) {
        const auto it = column_of.find(label);
        if (it == column_of.end()) throw std::invalid_argument("data file has no column for series '" + label + "'");
        source.push_back(it->second);
    }

    PanelData panel;
    panel.spec = spec;
    std::vector<std::vector<double>> rows;
    std::set<std::string> seen_dates;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields");
        }
        if (!seen_dates.insert(fields[0]).second) throw std::invalid_argument("duplicate date '" + fields[0] + "'");
        std::vector<double> row;
        row.reserve(source.size());
        for (const std::size_t c : source) {
            const std::string& cell = fields[c];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": non-numeric cell '" + cell +
                                            "' in column '" + header[c] + "'");
            }
            row.push_back(v);
        }
        panel.dates.push_back(fields[0]);
        rows.push_back(std::move(row));
    }
    panel.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(source.size()));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j < source.size(); ++j)
            panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = rows[t][j];
    return panel;
}

void write_panel(const PanelData& panel, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
    out << "date";
    for (const auto& label : panel.spec.bottom_labels) out << ',' << label;
    out << '\n';
    for (Eigen::Index t = 0; t < panel.values.rows(); ++t) {
        out << panel.dates[static_cast<std::size_t>(t)];
        for (Eigen::Index j = 0; j < panel.values.cols(); ++j) out << ',' << format_double(panel.values(t, j));
        out << '\n';
    }
}

std::string to_string(WindowMode mode) { return mode == WindowMode::sliding ? "sliding" : "expanding"; }

WindowMode parse_window_mode(const std::string& text) {
    if (text == "sliding") return WindowMode::sliding;
    if (text == "expanding") return WindowMode::expanding;
    throw std::invalid_argument("unknown window mode '" + text + "' (expected sliding or expanding)");
}

ScoreOptions application_score_options() {
    ScoreOptions options;
    options.interval_alphas = {0.05, 0.10, 0.20};
    return options;
}

int window_count(int t_len, int initial_window, int h) { return t_len - initial_window - h + 1; }

EvaluationResult rolling_evaluate(const PanelData& panel, const EvaluationOptions& options) {
    const int t_len = static_cast<int>(panel.values.rows());
    if (options.initial_window < 24) throw std::invalid_argument("initial window must be at least 24");
    if (options.h < 1) throw std::invalid_argument("horizon must be at least 1");
    if (options.initial_window + options.h > t_len) {
        throw std::invalid_argument("initial window plus horizon exceeds the sample length");
    }
    if (options.methods.empty()) throw std::invalid_argument("no methods requested");
    if (static_cast<int>(panel.dates.size()) != t_len) throw std::invalid_argument("panel dates/values length mismatch");

    EvaluationResult result;
    result.s = build_summing_matrix(panel.spec);
    const SummingMatrix& s = result.s;
    const Eigen::MatrixXd full = aggregate_panel(s, panel.values);
    const int windows = window_count(t_len, options.initial_window, options.h);

    std::vector<RunResult> per_window(static_cast<std::size_t>(windows));
    result.windows.resize(static_cast<std::size_t>(windows));
    parallel_for(static_cast<std::size_t>(windows), options.threads, [&](std::size_t idx) {
        const int w = static_cast<int>(idx);
        const int end = options.initial_window + w;  // exclusive end of training rows
        const int begin = options.window_mode == WindowMode::sliding ? w : 0;
        const int target = end + options.h - 1;
        WindowResult& wr = result.windows[idx];
        wr.window_end = panel.dates[static_cast<std::size_t>(end - 1)];
        wr.target = panel.dates[static_cast<std::size_t>(target)];
        wr.realized = full.row(target).transpose();
        wr.methods = options.methods;
        wr.point_forecasts.resize(options.methods.size());
        wr.marginal_variances.resize(options.methods.size());

        ForecastCase fc;
        fc.s = &s;
        fc.realized = wr.realized;
        try {
            const BaseForecastSet base =
                base_forecast_all(full.middleRows(begin, end - begin), options.h, options.base, s.row_labels);
            fc.base_forecast = base.point;
            estimate_covariances(base.residuals, fc);
        } catch (const std::exception& e) {
            for (const auto& m : options.methods)
                per_window[idx].failures.push_back({w, m.name, m.kind_name(), e.what()});
            return;
        }
        const auto outcomes = score_forecast(fc, options.methods, options.scores, w,
                                             derive_stream(options.seed, idx, kScoringPurpose), per_window[idx]);
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            if (!outcomes[k].ok) continue;
            wr.point_forecasts[k] = outcomes[k].point;
            wr.marginal_variances[k] = outcomes[k].marginal_variance;
        }
    });
    for (auto& r : per_window) {
        result.run.records.insert(result.run.records.end(), std::make_move_iterator(r.records.begin()),
                                  std::make_move_iterator(r.records.end()));
        result.run.failures.insert(result.run.failures.end(), r.failures.begin(), r.failures.end());
    }
    return result;
}

HierarchySpec tourism_hierarchy() { return {kTourismRegions, {0, 1}}; }

PanelData synthetic_tourism_panel(std::uint64_t seed, int months) {
    if (months < 1) throw std::invalid_argument("months must be positive");
    PanelData panel;
    panel.spec = tourism_hierarchy();
    const auto n = static_cast<int>(kTourismRegions.size());
    CounterRng rng(seed, derive_stream(seed, 0, 0x7075));

    std::map<char, int> state_index;
    for (const auto& label : kTourismRegions) state_index.try_emplace(label[0], static_cast<int>(state_index.size()));
    const int states = static_cast<int>(state_index.size());

    std::vector<double> state_phase(static_cast<std::size_t>(states));
    for (auto& p : state_phase) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
    struct Region {
        double log_level, slope, amplitude, phase, noise_sd;
        int state;
    };
    std::vector<Region> regions;
    for (const auto& label : kTourismRegions) {
        const int st = state_index[label[0]];
        regions.push_back({rng.uniform(std::log(150.0), std::log(6000.0)), rng.uniform(-0.001, 0.003),
                           rng.uniform(0.08, 0.35), state_phase[static_cast<std::size_t>(st)] + rng.uniform(-0.4, 0.4),
                           rng.uniform(0.05, 0.15), st});
    }

    panel.values.resize(months, n);
    std::vector<double> state_factor(static_cast<std::size_t>(states), 0.0);
    std::vector<double> idio(static_cast<std::size_t>(n), 0.0);
    for (int t = 0; t < months; ++t) {
        for (auto& f : state_factor) f = 0.6 * f + 0.05 * rng.normal();
        const double national = 0.03 * rng.normal();
        for (int j = 0; j < n; ++j) {
            const Region& r = regions[static_cast<std::size_t>(j)];
            auto& e = idio[static_cast<std::size_t>(j)];
            e = 0.3 * e + r.noise_sd * rng.normal();
            const double season = r.amplitude * std::sin(2.0 * std::numbers::pi * t / 12.0 + r.phase);
            const double log_value =
                r.log_level + r.slope * t + season + state_factor[static_cast<std::size_t>(r.state)] + national + e;
            panel.values(t, j) = std::exp(log_value);
        }
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d", 1998 + t / 12, t % 12 + 1);
        panel.dates.emplace_back(buf);
    }
    return panel;
}

}  // namespace gaussrec
