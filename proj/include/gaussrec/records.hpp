#pragma once

#include "gaussrec/hierarchy.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gaussrec {

/// One score for one replication (or rolling window) of one method.
/// series_label is a row label of S, or "multivariate" for joint scores.
struct ScoreRecord {
    int replication = 0;
    std::string method;
    std::string covariance_kind;
    std::string score_name;
    std::string series_label;
    double value = 0.0;
};

/// A method that produced no scores for a replication, with the reason.
struct FailureRecord {
    int replication = 0;
    std::string method;
    std::string covariance_kind;
    std::string reason;
};

struct RunResult {
    std::vector<ScoreRecord> records;
    std::vector<FailureRecord> failures;
};

inline const std::string kMultivariateLabel = "multivariate";

/// Percentage relative improvement of one (method, kind, score, series)
/// cell against the baseline, averaged over replications both have.
struct ImprovementRow {
    std::string method;
    std::string covariance_kind;
    std::string score_name;
    std::string series_label;
    double mean = 0.0;
    double baseline_mean = 0.0;
    double improvement = 0.0;
    int count = 0;
};

/// 100 (mean_method - mean_baseline) / |mean_baseline|. Negative is better.
/// Joint LS cells of the incoherent Base forecast are never emitted. Throws
/// std::invalid_argument when baseline records are missing and
/// std::domain_error when a baseline mean is zero.
std::vector<ImprovementRow> relative_improvement(const std::vector<ScoreRecord>& records,
                                                 const std::string& baseline_method = "BU",
                                                 const std::string& baseline_kind = "sample");

/// MSE relative improvement per hierarchy level plus the all-series average.
struct MseRow {
    std::string method;
    std::string covariance_kind;
    std::vector<double> level_improvement;  // one entry per level of S
    double average_improvement = 0.0;
};

struct MseTable {
    std::vector<std::string> level_names;
    std::vector<MseRow> rows;
};

/// Uses the squared-error ("MSE") records; the baseline is BU (its point
/// forecasts do not depend on the covariance kind).
MseTable mse_table(const std::vector<ScoreRecord>& records, const SummingMatrix& s);

/// Canonical record order: replication, then method/kind/score/series as emitted.
std::string format_double(double value);

void write_records(const std::vector<ScoreRecord>& records, const std::filesystem::path& path);
std::vector<ScoreRecord> read_records(const std::filesystem::path& path);
void write_failures(const std::vector<FailureRecord>& failures, const std::filesystem::path& path);

/// Long-format improvement table.
void write_improvements(const std::vector<ImprovementRow>& rows, const std::filesystem::path& path);
/// Joint scores in wide layout: one row per method, columns <kind>_<score>.
void write_multivariate_table(const std::vector<ImprovementRow>& rows, const std::filesystem::path& path);
/// One file per univariate score: rows method/kind, columns series labels.
void write_univariate_tables(const std::vector<ImprovementRow>& rows, const std::vector<std::string>& series_order,
                             const std::filesystem::path& directory);
void write_mse_table(const MseTable& table, const std::filesystem::path& path);

/// Plain-text summary of the joint-score table.
std::string summarize(const std::vector<ImprovementRow>& rows);

}  // namespace gaussrec
