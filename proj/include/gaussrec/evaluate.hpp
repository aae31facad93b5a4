#pragma once

#include "gaussrec/hierarchy.hpp"
#include "gaussrec/models.hpp"
#include "gaussrec/pipeline.hpp"
#include "gaussrec/records.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gaussrec {

/// Bottom-level observations with their hierarchy. Aggregates are always
/// computed from the bottom series, never read from file.
struct PanelData {
    std::vector<std::string> dates;
    Eigen::MatrixXd values;  // T x n, columns in spec.bottom_labels order
    HierarchySpec spec;
};

/// CSV: first column a period label, remaining columns bottom series keyed by
/// label (any order; extra columns are ignored).
PanelData load_panel(const std::filesystem::path& csv_path, const std::filesystem::path& hierarchy_path);
PanelData load_panel(const std::filesystem::path& csv_path, const HierarchySpec& spec);
void write_panel(const PanelData& panel, const std::filesystem::path& csv_path);

enum class WindowMode { sliding, expanding };
std::string to_string(WindowMode mode);
WindowMode parse_window_mode(const std::string& text);

struct EvaluationOptions {
    int initial_window = 120;
    int h = 1;
    WindowMode window_mode = WindowMode::sliding;
    std::vector<MethodSpec> methods;
    ScoreOptions scores;
    BaseForecastOptions base;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Interval levels used for the application: alpha in {0.05, 0.10, 0.20}.
ScoreOptions application_score_options();

struct WindowResult {
    std::string window_end;  // last training period
    std::string target;      // forecast period
    Eigen::VectorXd realized;
    std::vector<MethodSpec> methods;
    std::vector<Eigen::VectorXd> point_forecasts;      // empty when the method failed
    std::vector<Eigen::VectorXd> marginal_variances;   // empty when the method failed
};

struct EvaluationResult {
    RunResult run;
    std::vector<WindowResult> windows;
    SummingMatrix s;
};

/// T - initial_window - h + 1 windows advancing one period at a time; each
/// window fits base models, reconciles and scores the h-step forecast.
/// Window failures are recorded, never fatal.
EvaluationResult rolling_evaluate(const PanelData& panel, const EvaluationOptions& options);

int window_count(int t_len, int initial_window, int h);

/// Seeded monthly panel shaped like the Australian domestic tourism
/// hierarchy: 7 states, 77 regions, trend + seasonality + correlated noise.
HierarchySpec tourism_hierarchy();
PanelData synthetic_tourism_panel(std::uint64_t seed, int months = 264);

}  // namespace gaussrec
