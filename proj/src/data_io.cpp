#include "eppr/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "eppr/error.hpp"

namespace eppr {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits one CSV record; double quotes delimit fields and "" is a literal quote.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

TargetColumn parse_target(const std::string& text) {
    std::size_t idx = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, idx);
    if (!text.empty() && ec == std::errc{} && ptr == end) return idx;
    return text;
}

RawTable read_table(const std::string& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::file_not_found, "no such file: " + path);
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::file_not_found, "cannot open " + path);

    RawTable table;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::no_usable_rows, path + " is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    for (auto& h : split_record(line)) table.header.emplace_back(trim(h));
    const std::size_t cols = table.header.size();

    std::vector<bool> column_seen_numeric(cols, false);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_record(line);
        std::vector<double> row(cols, std::numeric_limits<double>::quiet_NaN());
        bool ok = fields.size() == cols;
        for (std::size_t j = 0; j < std::min(cols, fields.size()); ++j) {
            if (const auto v = parse_number(fields[j])) {
                row[j] = *v;
                column_seen_numeric[j] = true;
            } else {
                ok = false;
            }
        }
        table.rows.push_back(std::move(row));
        table.row_ok.push_back(ok);
    }
    if (!table.rows.empty()) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!column_seen_numeric[j]) {
                throw Error(ErrorCode::non_numeric_column, "column '" + table.header[j] + "' has no numeric values");
            }
        }
    }
    return table;
}

std::size_t RawTable::usable_rows() const noexcept {
    return static_cast<std::size_t>(std::count(row_ok.begin(), row_ok.end(), true));
}

Dataset load_csv(const std::string& path, const TargetColumn& target) {
    const RawTable table = read_table(path);
    const std::size_t cols = table.header.size();

    std::size_t target_idx = cols;
    if (const auto* name = std::get_if<std::string>(&target)) {
        const auto it = std::find(table.header.begin(), table.header.end(), *name);
        if (it == table.header.end()) throw Error(ErrorCode::missing_target, "target column '" + *name + "' not in header");
        target_idx = static_cast<std::size_t>(it - table.header.begin());
    } else {
        target_idx = std::get<std::size_t>(target);
        if (target_idx >= cols) {
            throw Error(ErrorCode::missing_target,
                        "target index " + std::to_string(target_idx) + " out of range for " + std::to_string(cols) + " columns");
        }
    }
    if (cols < 2) throw Error(ErrorCode::invalid_input, "need at least one predictor and a target column");
    const std::size_t usable = table.usable_rows();
    if (usable == 0) throw Error(ErrorCode::no_usable_rows, path + " has no usable rows");

    Dataset data;
    data.X.resize(static_cast<Eigen::Index>(usable), static_cast<Eigen::Index>(cols - 1));
    data.y.resize(static_cast<Eigen::Index>(usable));
    Eigen::Index i = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (!table.row_ok[r]) continue;
        Eigen::Index c = 0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = table.rows[r][j];
            if (j == target_idx) {
                data.y[i] = v;
            } else {
                data.X(i, c++) = v;
            }
        }
        ++i;
    }
    for (std::size_t j = 0; j < cols; ++j) {
        if (j != target_idx) data.column_names.push_back(table.header[j]);
    }
    data.column_names.push_back(table.header[target_idx]);
    data.dropped_rows = table.rows.size() - usable;
    return data;
}

FeatureScaling fit_scaling(const Eigen::MatrixXd& X) {
    if (X.rows() < 1) throw Error(ErrorCode::invalid_input, "cannot fit scaling on zero rows");
    FeatureScaling s;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        s.lo.push_back(X.col(j).minCoeff());
        s.hi.push_back(X.col(j).maxCoeff());
    }
    return s;
}

Eigen::MatrixXd apply_scaling(const FeatureScaling& scaling, const Eigen::MatrixXd& X) {
    if (static_cast<std::size_t>(X.cols()) != scaling.size()) {
        throw Error(ErrorCode::shape, "expected " + std::to_string(scaling.size()) + " predictor columns, got " +
                                          std::to_string(X.cols()));
    }
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double lo = scaling.lo[static_cast<std::size_t>(j)];
        const double hi = scaling.hi[static_cast<std::size_t>(j)];
        if (!(hi > lo)) {
            out.col(j).setZero();
            continue;
        }
        const double scale = 2.0 / (hi - lo);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            out(i, j) = std::clamp((X(i, j) - lo) * scale - 1.0, -1.0, 1.0);
        }
    }
    return out;
}

Partition partition_indices(std::size_t N, Rng& rng) {
    if (N < 3) throw Error(ErrorCode::invalid_input, "partition needs at least 3 rows");
    const std::size_t n_train = std::min<std::size_t>(2 * N / 3, 1000);
    std::vector<std::size_t> idx(N);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_train; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, N - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    Partition part;
    part.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    part.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(part.train.begin(), part.train.end());
    std::sort(part.test.begin(), part.test.end());
    return part;
}

Dataset take_rows(const Dataset& data, std::span<const std::size_t> rows) {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), data.X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(rows[r]);
        out.X.row(static_cast<Eigen::Index>(r)) = data.X.row(src);
        out.y[static_cast<Eigen::Index>(r)] = data.y[src];
    }
    out.column_names = data.column_names;
    return out;
}

std::pair<Dataset, Dataset> partition(const Dataset& data, Rng& rng) {
    const Partition part = partition_indices(static_cast<std::size_t>(data.n()), rng);
    return {take_rows(data, part.train), take_rows(data, part.test)};
}

void write_csv(const std::string& path, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) out << format_double(X(i, j)) << ',';
        out << format_double(y[i]) << '\n';
    }
    if (!out) throw Error(ErrorCode::io, "failed writing " + path);
}

}  // namespace eppr
