#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eppr/config.hpp"
#include "eppr/data_io.hpp"
#include "eppr/greedy.hpp"

namespace eppr {

/// Average of B independently randomized greedy runs.
struct EnsembleModel {
    FitConfig config;
    FeatureScaling scaling;
    /// Member outputs are clamped to [-t, t] when set.
    std::optional<double> truncation;
    std::shared_ptr<const KnotVector> knots;
    std::vector<PprModel> members;

    std::uint64_t seed() const noexcept { return config.seed; }
    int n_features() const noexcept { return static_cast<int>(scaling.size()); }
};

/// Tuning defaults for n samples and p predictors:
/// q = min(floor(2p/3), floor(n^0.4)) (at least 1), ell = max(1, floor(p/q)),
/// J = clamp(floor(n^0.2) + 4, 6, 30), cubic splines, B = 50, k_max = 20,
/// nu = 0.2, BIC stopping, aga, no truncation.
FitConfig default_config(int n, int p);

/// Fits scaling on X, then runs the B members (concurrently when
/// config.threads allows). Member b draws from stream (config.seed, b).
EnsembleModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config);
EnsembleModel fit(const Dataset& train, const FitConfig& config);

/// Per-member predictions on raw rows (after truncation), members x rows.
Eigen::MatrixXd predict_members(const EnsembleModel& model, const Eigen::MatrixXd& X);

/// Mean of the (truncated) member predictions. The per-row sum runs over
/// sorted member values, so member order does not affect the result.
Eigen::VectorXd predict(const EnsembleModel& model, const Eigen::MatrixXd& X);

/// 1 where predict > 0.5, else 0.
std::vector<int> classify(const EnsembleModel& model, const Eigen::MatrixXd& X);
int classify_value(double prediction) noexcept;

/// Self-describing JSON text; serialize(parse(serialize(m))) == serialize(m).
std::string serialize(const EnsembleModel& model);
EnsembleModel parse_model(const std::string& text);

void save_model(const EnsembleModel& model, const std::string& path);
EnsembleModel load_model(const std::string& path);

}  // namespace eppr
