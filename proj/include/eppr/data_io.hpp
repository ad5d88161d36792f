#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "eppr/rng.hpp"

namespace eppr {

/// Per-column min-max map of [lo_j, hi_j] onto [-1, 1].
struct FeatureScaling {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t size() const noexcept { return lo.size(); }
    bool operator==(const FeatureScaling&) const = default;
};

struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    /// Predictor names followed by the response name.
    std::vector<std::string> column_names;
    std::optional<FeatureScaling> scaling;
    std::size_t dropped_rows = 0;

    Eigen::Index n() const noexcept { return X.rows(); }
    Eigen::Index p() const noexcept { return X.cols(); }
};

/// Response column by header name or zero-based position.
using TargetColumn = std::variant<std::string, std::size_t>;

/// Every data record of a headed CSV file. Cells that are empty or not
/// numbers read as NaN and mark their row as not ok; a record with the wrong
/// field count is not ok either.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<bool> row_ok;

    std::size_t usable_rows() const noexcept;
};

/// Throws file_not_found, or non_numeric_column when some column has no
/// numeric cell at all.
RawTable read_table(const std::string& path);

/// Reads a headed, comma-separated file. Rows with empty, non-numeric or
/// missing cells are dropped and counted in `dropped_rows`.
Dataset load_csv(const std::string& path, const TargetColumn& target);

/// Interprets a CLI target argument: all-digit text is a zero-based position,
/// anything else a header name.
TargetColumn parse_target(const std::string& text);

FeatureScaling fit_scaling(const Eigen::MatrixXd& X);
Eigen::MatrixXd apply_scaling(const FeatureScaling& scaling, const Eigen::MatrixXd& X);

/// Training rows n = min(floor(2N/3), 1000), sampled without replacement;
/// the rest form the test set. Both index lists are sorted.
struct Partition {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
Partition partition_indices(std::size_t N, Rng& rng);

/// Row subset of a dataset (scaling is not carried over).
Dataset take_rows(const Dataset& data, std::span<const std::size_t> rows);

std::pair<Dataset, Dataset> partition(const Dataset& data, Rng& rng);

/// Writes X and y under the given header (predictors then response).
void write_csv(const std::string& path, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& header);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace eppr
