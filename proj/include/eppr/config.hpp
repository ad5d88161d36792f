#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace eppr {

enum class Variant { aga, oga, rga };
enum class Stopping { fixed_k, bic };
enum class Truncation { off, ln_n };

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(Stopping s) noexcept;
std::string_view to_string(Truncation t) noexcept;

/// Throws invalid_configuration on unknown names.
Variant parse_variant(std::string_view s);
Stopping parse_stopping(std::string_view s);
Truncation parse_truncation(std::string_view s);

/// Tuning parameters for one ensemble fit.
struct FitConfig {
    Variant variant = Variant::aga;
    int q = 1;                // predictors per candidate subset
    int ell = 1;              // candidate subsets per greedy step
    int B = 50;               // ensemble members
    int k_max = 20;           // cap on ridges per member
    int J = 8;                // spline basis size
    int degree = 3;
    double nu = 0.2;          // BIC penalty exponent
    Stopping stopping = Stopping::bic;
    Truncation truncation = Truncation::off;
    std::uint64_t seed = 0;
    int n_starts = 5;         // single-index starts per candidate
    int threads = 0;          // 0: hardware concurrency

    bool operator==(const FitConfig&) const = default;
};

/// Checks the invariants that do not depend on data, plus q <= p and
/// n > J + q when `p`/`n` are given.
void validate(const FitConfig& config, std::optional<int> n = std::nullopt, std::optional<int> p = std::nullopt);

}  // namespace eppr
