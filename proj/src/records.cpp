#include "gaussrec/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace gaussrec {

namespace {

using CellKey = std::tuple<std::string, std::string, std::string, std::string>;

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string sanitize(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return text;
}

int method_rank(const std::string& method) {
    static const std::vector<std::string> order{"BU", "OLS", "WLS", "MinT", "Base"};
    const auto it = std::find(order.begin(), order.end(), method);
    return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

bool is_joint(const ImprovementRow& row) { return row.series_label == kMultivariateLabel; }

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::vector<ImprovementRow> relative_improvement(const std::vector<ScoreRecord>& records,
                                                 const std::string& baseline_method,
                                                 const std::string& baseline_kind) {
    std::map<CellKey, std::size_t> index;
    std::vector<CellKey> keys;
    std::vector<std::map<int, double>> values;
    for (const auto& r : records) {
        const CellKey key{r.method, r.covariance_kind, r.score_name, r.series_label};
        auto [it, inserted] = index.try_emplace(key, keys.size());
        if (inserted) {
            keys.push_back(key);
            values.emplace_back();
        }
        values[it->second][r.replication] = r.value;
    }
    bool any_baseline = false;
    for (const auto& key : keys) {
        if (std::get<0>(key) == baseline_method && std::get<1>(key) == baseline_kind) any_baseline = true;
    }
    if (!records.empty() && !any_baseline) {
        throw std::invalid_argument("no records for baseline " + baseline_method + "/" + baseline_kind);
    }

    std::vector<ImprovementRow> rows;
    for (std::size_t k = 0; k < keys.size(); ++k) {
        const auto& [method, kind, score, label] = keys[k];
        if (method == "Base" && score == "LS" && label == kMultivariateLabel) continue;
        const auto base_it = index.find(CellKey{baseline_method, baseline_kind, score, label});
        if (base_it == index.end()) continue;
        const auto& mine = values[k];
        const auto& theirs = values[base_it->second];
        double sum = 0.0;
        double base_sum = 0.0;
        int count = 0;
        for (const auto& [rep, v] : mine) {
            const auto b = theirs.find(rep);
            if (b == theirs.end()) continue;
            sum += v;
            base_sum += b->second;
            ++count;
        }
        if (count == 0) continue;
        ImprovementRow row{method, kind, score, label, sum / count, base_sum / count, 0.0, count};
        if (row.baseline_mean == 0.0) {
            throw std::domain_error("baseline mean is zero for " + score + "/" + label);
        }
        row.improvement = 100.0 * (row.mean - row.baseline_mean) / std::abs(row.baseline_mean);
        rows.push_back(std::move(row));
    }
    return rows;
}

MseTable mse_table(const std::vector<ScoreRecord>& records, const SummingMatrix& s) {
    // (method, kind) -> label -> rep -> squared error
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::map<int, double>>> cells;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& r : records) {
        if (r.score_name != "MSE") continue;
        const auto key = std::make_pair(r.method, r.covariance_kind);
        if (!cells.count(key)) order.push_back(key);
        cells[key][r.series_label][r.replication] = r.value;
    }
    MseTable table;
    table.level_names = s.level_names;
    if (cells.empty()) return table;

    auto baseline = cells.end();
    if (auto it = cells.find({"BU", "sample"}); it != cells.end()) {
        baseline = it;
    } else {
        for (auto it2 = cells.begin(); it2 != cells.end(); ++it2) {
            if (it2->first.first == "BU") {
                baseline = it2;
                break;
            }
        }
    }
    if (baseline == cells.end()) throw std::invalid_argument("mse_table: no BU squared-error records");

    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return method_rank(a.first) < method_rank(b.first); });

    const int levels = s.level_count();
    for (const auto& key : order) {
        const auto& mine = cells[key];
        const auto& base = baseline->second;
        // Replications present for both, taken from the first series.
        std::set<int> reps;
        if (const auto first = mine.find(s.row_labels.front()); first != mine.end()) {
            for (const auto& [rep, v] : first->second) {
                const auto b = base.find(s.row_labels.front());
                if (b != base.end() && b->second.count(rep)) reps.insert(rep);
            }
        }
        if (reps.empty()) continue;
        auto series_mse = [&](const std::map<std::string, std::map<int, double>>& src, const std::string& label) {
            const auto it = src.find(label);
            if (it == src.end()) throw std::invalid_argument("mse_table: missing series " + label);
            double acc = 0.0;
            for (const int rep : reps) {
                const auto v = it->second.find(rep);
                if (v == it->second.end()) throw std::invalid_argument("mse_table: ragged records for " + label);
                acc += v->second;
            }
            return acc / static_cast<double>(reps.size());
        };
        std::vector<double> level_sum(static_cast<std::size_t>(levels), 0.0);
        std::vector<double> level_base(static_cast<std::size_t>(levels), 0.0);
        double all = 0.0;
        double all_base = 0.0;
        for (int i = 0; i < s.m; ++i) {
            const auto& label = s.row_labels[static_cast<std::size_t>(i)];
            const auto lvl = static_cast<std::size_t>(s.row_level[static_cast<std::size_t>(i)]);
            const double a = series_mse(mine, label);
            const double b = series_mse(base, label);
            level_sum[lvl] += a;
            level_base[lvl] += b;
            all += a;
            all_base += b;
        }
        MseRow row;
        row.method = key.first;
        row.covariance_kind = key.second;
        for (int l = 0; l < levels; ++l) {
            const auto li = static_cast<std::size_t>(l);
            // Level means share the series count, so the ratio of sums is the ratio of means.
            row.level_improvement.push_back(100.0 * (level_sum[li] - level_base[li]) / std::abs(level_base[li]));
        }
        row.average_improvement = 100.0 * (all - all_base) / std::abs(all_base);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_records(const std::vector<ScoreRecord>& records, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "replication,method,covariance_kind,score_name,series_label,value\n";
    for (const auto& r : records) {
        out << r.replication << ',' << r.method << ',' << r.covariance_kind << ',' << r.score_name << ','
            << r.series_label << ',' << format_double(r.value) << '\n';
    }
}

std::vector<ScoreRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
    std::vector<ScoreRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 6) throw std::runtime_error("malformed record line: " + line);
        ScoreRecord r;
        r.replication = std::stoi(f[0]);
        r.method = f[1];
        r.covariance_kind = f[2];
        r.score_name = f[3];
        r.series_label = f[4];
        char* end = nullptr;
        r.value = std::strtod(f[5].c_str(), &end);
        if (end == f[5].c_str()) throw std::runtime_error("non-numeric value in record line: " + line);
        records.push_back(std::move(r));
    }
    return records;
}

void write_failures(const std::vector<FailureRecord>& failures, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "replication,method,covariance_kind,reason\n";
    for (const auto& f : failures) {
        out << f.replication << ',' << f.method << ',' << f.covariance_kind << ',' << sanitize(f.reason) << '\n';
    }
}

void write_improvements(const std::vector<ImprovementRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "method,covariance_kind,score_name,series_label,mean,baseline_mean,improvement,count\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.covariance_kind << ',' << r.score_name << ',' << r.series_label << ','
            << format_double(r.mean) << ',' << format_double(r.baseline_mean) << ',' << format_double(r.improvement)
            << ',' << r.count << '\n';
    }
}

void write_multivariate_table(const std::vector<ImprovementRow>& rows, const std::filesystem::path& path) {
    std::vector<std::string> kinds;
    std::vector<std::string> scores;
    std::vector<std::string> methods;
    std::map<std::tuple<std::string, std::string, std::string>, double> cell;
    for (const auto& r : rows) {
        if (!is_joint(r)) continue;
        if (std::find(kinds.begin(), kinds.end(), r.covariance_kind) == kinds.end()) kinds.push_back(r.covariance_kind);
        if (std::find(scores.begin(), scores.end(), r.score_name) == scores.end()) scores.push_back(r.score_name);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        cell[{r.method, r.covariance_kind, r.score_name}] = r.improvement;
    }
    std::stable_sort(methods.begin(), methods.end(),
                     [](const auto& a, const auto& b) { return method_rank(a) < method_rank(b); });
    // LS is always listed (as a blank for Base) to keep the layout fixed.
    if (!scores.empty() && std::find(scores.begin(), scores.end(), "LS") == scores.end()) scores.insert(scores.begin(), "LS");
    std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        auto rank = [](const std::string& s) { return s == "LS" ? 0 : s == "ES" ? 1 : s == "VS" ? 2 : 3; };
        return rank(a) < rank(b);
    });
    auto out = open_out(path);
    out << "method";
    for (const auto& k : kinds)
        for (const auto& s : scores) out << ',' << k << '_' << s;
    out << '\n';
    for (const auto& m : methods) {
        out << m;
        for (const auto& k : kinds) {
            for (const auto& s : scores) {
                out << ',';
                if (const auto it = cell.find({m, k, s}); it != cell.end()) out << format_double(it->second);
            }
        }
        out << '\n';
    }
}

void write_univariate_tables(const std::vector<ImprovementRow>& rows, const std::vector<std::string>& series_order,
                             const std::filesystem::path& directory) {
    std::vector<std::string> scores;
    for (const auto& r : rows) {
        if (is_joint(r) || r.score_name == "MSE") continue;
        if (std::find(scores.begin(), scores.end(), r.score_name) == scores.end()) scores.push_back(r.score_name);
    }
    for (const auto& score : scores) {
        std::vector<std::pair<std::string, std::string>> method_kinds;
        std::map<std::tuple<std::string, std::string, std::string>, double> cell;
        for (const auto& r : rows) {
            if (r.score_name != score || is_joint(r)) continue;
            const auto mk = std::make_pair(r.method, r.covariance_kind);
            if (std::find(method_kinds.begin(), method_kinds.end(), mk) == method_kinds.end()) method_kinds.push_back(mk);
            cell[{r.method, r.covariance_kind, r.series_label}] = r.improvement;
        }
        std::stable_sort(method_kinds.begin(), method_kinds.end(),
                         [](const auto& a, const auto& b) { return method_rank(a.first) < method_rank(b.first); });
        auto out = open_out(directory / ("univariate_" + score + ".csv"));
        out << "method,covariance_kind";
        for (const auto& label : series_order) out << ',' << label;
        out << '\n';
        for (const auto& [m, k] : method_kinds) {
            out << m << ',' << k;
            for (const auto& label : series_order) {
                out << ',';
                if (const auto it = cell.find({m, k, label}); it != cell.end()) out << format_double(it->second);
            }
            out << '\n';
        }
    }
}

void write_mse_table(const MseTable& table, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "method,covariance_kind";
    for (const auto& name : table.level_names) out << ',' << name;
    out << ",Average\n";
    for (const auto& row : table.rows) {
        out << row.method << ',' << row.covariance_kind;
        for (const double v : row.level_improvement) out << ',' << format_double(v);
        out << ',' << format_double(row.average_improvement) << '\n';
    }
}

std::string summarize(const std::vector<ImprovementRow>& rows) {
    std::ostringstream out;
    out << "Percentage relative improvement vs BU (sample); negative is better\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6s %-10s %-5s %10s %14s %6s\n", "method", "cov", "score", "rel.imp", "mean", "n");
    out << buf;
    for (const auto& r : rows) {
        if (!is_joint(r)) continue;
        std::snprintf(buf, sizeof buf, "%-6s %-10s %-5s %10.2f %14.6g %6d\n", r.method.c_str(),
                      r.covariance_kind.c_str(), r.score_name.c_str(), r.improvement, r.mean, r.count);
        out << buf;
    }
    return out.str();
}

}  // namespace gaussrec
