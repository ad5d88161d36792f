#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace eppr {

enum class Scenario { single_index, additive3, ppr3, noise, two_gaussian };

Scenario parse_scenario(std::string_view name);
std::string_view to_string(Scenario s) noexcept;

/// Smallest p a scenario accepts.
int min_predictors(Scenario s) noexcept;

struct SynthData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    /// Human-readable description of the generating function, including the
    /// drawn directions.
    std::string description;
};

/// Regression scenarios draw X uniformly from [-1, 1]^p and add
/// N(0, noise^2) to the signal. two_gaussian draws a fair 0/1 label and
/// X ~ N(+-1.2816 e_1, I_p), so the Bayes error is 0.10; noise is ignored.
SynthData generate(Scenario scenario, int n, int p, double noise, std::uint64_t seed);

}  // namespace eppr
