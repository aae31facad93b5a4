#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace gaussrec {

/// A strict hierarchy encoded by bottom-level labels. Each aggregation level
/// groups the bottom series sharing a label prefix of the given length; a
/// prefix length of 0 is the grand total.
struct HierarchySpec {
    std::vector<std::string> bottom_labels;
    std::vector<int> level_prefix_lengths;

    /// Throws std::invalid_argument on duplicate/empty labels, prefix lengths
    /// that are not strictly increasing, or a prefix as long as a label.
    void validate() const;
};

/// The m x n aggregation matrix. Aggregate rows come first (levels top-down,
/// prefixes lexicographic within a level) followed by the n x n identity.
struct SummingMatrix {
    Eigen::MatrixXd s;
    int m = 0;
    int n = 0;
    std::vector<std::string> row_labels;
    /// Level index per row; aggregate levels are 0..L-1, the bottom level is L.
    std::vector<int> row_level;
    /// Display names per level, "Total", "Level1", ..., "Bottom".
    std::vector<std::string> level_names;

    int m_star() const { return m - n; }
    int level_count() const { return static_cast<int>(level_names.size()); }
    /// The (m - n) x n aggregate block C, with S' = [C' | I].
    Eigen::MatrixXd aggregate_block() const { return s.topRows(m - n); }
    /// Row indices belonging to a level.
    std::vector<int> rows_in_level(int level) const;
};

SummingMatrix build_summing_matrix(const HierarchySpec& spec);

/// Wraps an arbitrary matrix already in bottom-last convention. Throws if the
/// last n rows are not the identity or an entry is not 0/1.
SummingMatrix summing_matrix_from_dense(const Eigen::MatrixXd& s);

/// y = S b.
Eigen::VectorXd aggregate(const SummingMatrix& s, const Eigen::VectorXd& b);

/// Row-wise aggregation of a T x n bottom panel to T x m.
Eigen::MatrixXd aggregate_panel(const SummingMatrix& s, const Eigen::MatrixXd& bottom);

/// max |y_agg - C y_bottom|; zero iff y lies in span(S).
double coherence_discrepancy(const SummingMatrix& s, const Eigen::VectorXd& y);

/// Line 1: comma-separated prefix lengths. Following lines: one bottom label each.
HierarchySpec parse_hierarchy_spec(const std::string& text);
HierarchySpec read_hierarchy_spec(const std::filesystem::path& path);
void write_hierarchy_spec(const HierarchySpec& spec, const std::filesystem::path& path);

}  // namespace gaussrec
