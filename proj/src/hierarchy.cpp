#include "gaussrec/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gaussrec {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string level_name(int prefix_length, int index) {
    if (prefix_length == 0) {
        return "Total";
    }
    return "Level" + std::to_string(index);
}

}  // namespace

void HierarchySpec::validate() const {
    if (bottom_labels.empty()) {
        throw std::invalid_argument("hierarchy spec has no bottom labels");
    }
    std::set<std::string> seen;
    std::size_t shortest = bottom_labels.front().size();
    for (const auto& label : bottom_labels) {
        if (label.empty()) {
            throw std::invalid_argument("hierarchy spec has an empty bottom label");
        }
        if (label.find_first_of(", \t\r\n") != std::string::npos) {
            throw std::invalid_argument("bottom label '" + label + "' contains a comma or whitespace");
        }
        if (!seen.insert(label).second) {
            throw std::invalid_argument("duplicate bottom label '" + label + "'");
        }
        shortest = std::min(shortest, label.size());
    }
    for (std::size_t i = 0; i < level_prefix_lengths.size(); ++i) {
        const int len = level_prefix_lengths[i];
        if (len < 0) {
            throw std::invalid_argument("negative prefix length");
        }
        if (i > 0 && len <= level_prefix_lengths[i - 1]) {
            throw std::invalid_argument("prefix lengths must be strictly increasing");
        }
        if (static_cast<std::size_t>(len) >= shortest) {
            throw std::invalid_argument("prefix length " + std::to_string(len) +
                                        " is not shorter than every bottom label");
        }
    }
}

std::vector<int> SummingMatrix::rows_in_level(int level) const {
    std::vector<int> rows;
    for (int i = 0; i < m; ++i) {
        if (row_level[static_cast<std::size_t>(i)] == level) {
            rows.push_back(i);
        }
    }
    return rows;
}

SummingMatrix build_summing_matrix(const HierarchySpec& spec) {
    spec.validate();
    const int n = static_cast<int>(spec.bottom_labels.size());

    struct AggregateRow {
        std::string label;
        int level;
        std::vector<int> members;
    };
    std::vector<AggregateRow> rows;
    SummingMatrix out;
    int level_index = 0;
    for (const int len : spec.level_prefix_lengths) {
        std::map<std::string, std::vector<int>> groups;
        for (int j = 0; j < n; ++j) {
            groups[spec.bottom_labels[static_cast<std::size_t>(j)].substr(0, static_cast<std::size_t>(len))]
                .push_back(j);
        }
        for (auto& [prefix, members] : groups) {
            rows.push_back({len == 0 ? std::string("Total") : prefix, level_index, std::move(members)});
        }
        out.level_names.push_back(level_name(len, level_index));
        ++level_index;
    }
    out.level_names.push_back("Bottom");

    out.n = n;
    out.m = static_cast<int>(rows.size()) + n;
    out.s = Eigen::MatrixXd::Zero(out.m, n);
    int r = 0;
    for (const auto& row : rows) {
        for (const int j : row.members) {
            out.s(r, j) = 1.0;
        }
        out.row_labels.push_back(row.label);
        out.row_level.push_back(row.level);
        ++r;
    }
    out.s.bottomRows(n).setIdentity();
    for (const auto& label : spec.bottom_labels) {
        out.row_labels.push_back(label);
        out.row_level.push_back(level_index);
    }
    return out;
}

SummingMatrix summing_matrix_from_dense(const Eigen::MatrixXd& s) {
    const auto m = s.rows();
    const auto n = s.cols();
    if (n == 0 || m < n) {
        throw std::invalid_argument("summing matrix must have at least as many rows as columns");
    }
    if (!s.bottomRows(n).isIdentity(0.0)) {
        throw std::invalid_argument("summing matrix is not in bottom-last convention (identity block missing)");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (s(i, j) != 0.0 && s(i, j) != 1.0) {
                throw std::invalid_argument("summing matrix entries must be 0 or 1");
            }
        }
    }
    SummingMatrix out;
    out.s = s;
    out.m = static_cast<int>(m);
    out.n = static_cast<int>(n);
    for (Eigen::Index i = 0; i < m - n; ++i) {
        out.row_labels.push_back("A" + std::to_string(i));
        out.row_level.push_back(0);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        out.row_labels.push_back("B" + std::to_string(j));
        out.row_level.push_back(m > n ? 1 : 0);
    }
    if (m > n) {
        out.level_names = {"Aggregate", "Bottom"};
    } else {
        out.level_names = {"Bottom"};
    }
    return out;
}

Eigen::VectorXd aggregate(const SummingMatrix& s, const Eigen::VectorXd& b) {
    if (b.size() != s.n) {
        throw std::invalid_argument("aggregate: expected a bottom vector of length " + std::to_string(s.n) +
                                    ", got " + std::to_string(b.size()));
    }
    return s.s * b;
}

Eigen::MatrixXd aggregate_panel(const SummingMatrix& s, const Eigen::MatrixXd& bottom) {
    if (bottom.cols() != s.n) {
        throw std::invalid_argument("aggregate_panel: panel has " + std::to_string(bottom.cols()) +
                                    " columns, expected " + std::to_string(s.n));
    }
    return bottom * s.s.transpose();
}

double coherence_discrepancy(const SummingMatrix& s, const Eigen::VectorXd& y) {
    if (y.size() != s.m) {
        throw std::invalid_argument("coherence_discrepancy: expected a vector of length " + std::to_string(s.m) +
                                    ", got " + std::to_string(y.size()));
    }
    if (s.m == s.n) {
        return 0.0;
    }
    const Eigen::VectorXd implied = s.aggregate_block() * y.tail(s.n);
    return (y.head(s.m_star()) - implied).cwiseAbs().maxCoeff();
}

HierarchySpec parse_hierarchy_spec(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    HierarchySpec spec;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("hierarchy file is empty");
    }
    std::istringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) {
        field = trim(field);
        if (field.empty()) {
            continue;
        }
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(field, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("hierarchy file: bad prefix length '" + field + "'");
        }
        if (used != field.size()) {
            throw std::invalid_argument("hierarchy file: bad prefix length '" + field + "'");
        }
        spec.level_prefix_lengths.push_back(value);
    }
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) {
            spec.bottom_labels.push_back(line);
        }
    }
    spec.validate();
    return spec;
}

HierarchySpec read_hierarchy_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open hierarchy file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_hierarchy_spec(buffer.str());
}

void write_hierarchy_spec(const HierarchySpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write hierarchy file " + path.string());
    }
    for (std::size_t i = 0; i < spec.level_prefix_lengths.size(); ++i) {
        out << (i ? "," : "") << spec.level_prefix_lengths[i];
    }
    out << '\n';
    for (const auto& label : spec.bottom_labels) {
        out << label << '\n';
    }
}

}  // namespace gaussrec
