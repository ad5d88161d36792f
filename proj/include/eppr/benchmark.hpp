#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eppr/config.hpp"
#include "eppr/data_io.hpp"

namespace eppr {

enum class Task { regression, classification };

Task parse_task(std::string_view s);
std::string_view to_string(Task t) noexcept;

/// Explicit settings that replace the per-repeat defaults.
struct ConfigOverrides {
    std::optional<Variant> variant;
    std::optional<int> q;
    std::optional<int> ell;
    std::optional<int> B;
    std::optional<int> k_max;
    std::optional<int> J;
    std::optional<int> degree;
    std::optional<double> nu;
    std::optional<Stopping> stopping;
    std::optional<Truncation> truncation;
    std::optional<int> threads;

    void apply(FitConfig& config) const;
};

/// Ordinary least squares with intercept on min-max scaled predictors.
struct LinearBaseline {
    FeatureScaling scaling;
    Eigen::VectorXd coefficients;  // intercept first

    static LinearBaseline fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

struct RepeatResult {
    int index = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::optional<double> metric;
    std::optional<double> baseline_metric;
    std::string error;
    double seconds = 0.0;
};

struct BenchmarkReport {
    Task task = Task::regression;
    std::uint64_t seed = 0;
    int repeats = 0;
    bool baseline = false;
    FitConfig config;  // configuration used by repeat 0
    std::vector<RepeatResult> results;

    /// Mean / standard deviation over repeats whose metric was defined.
    double mean() const;
    double stddev() const;
    std::optional<double> baseline_mean() const;
    std::optional<double> baseline_stddev() const;
};

struct BenchmarkOptions {
    Task task = Task::regression;
    int repeats = 10;
    std::uint64_t seed = 0;
    bool baseline = false;
    ConfigOverrides overrides;
};

/// R repeats of {partition -> fit on train -> metric on test}; repeat r
/// partitions with stream (seed, 2r) and fits with seed stream_seed(seed, 2r+1).
BenchmarkReport run_benchmark(const Dataset& data, const BenchmarkOptions& options);

/// Table followed by a key=value block. Timings are left out unless asked
/// for, keeping the text reproducible.
std::string render_report(const BenchmarkReport& report, bool include_timings = false);

}  // namespace eppr
