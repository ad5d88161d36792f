#include "eppr/config.hpp"

#include <string>

#include "eppr/error.hpp"

namespace eppr {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_configuration: return "invalid configuration";
        case ErrorCode::invalid_input: return "invalid input";
        case ErrorCode::domain: return "domain error";
        case ErrorCode::unsupported: return "unsupported operation";
        case ErrorCode::shape: return "shape mismatch";
        case ErrorCode::file_not_found: return "file not found";
        case ErrorCode::io: return "I/O error";
        case ErrorCode::missing_target: return "missing target column";
        case ErrorCode::no_usable_rows: return "no usable rows";
        case ErrorCode::non_numeric_column: return "non-numeric column";
        case ErrorCode::parse: return "parse error";
        case ErrorCode::undefined_metric: return "undefined metric";
    }
    return "unknown error";
}

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::aga: return "aga";
        case Variant::oga: return "oga";
        case Variant::rga: return "rga";
    }
    return "?";
}

std::string_view to_string(Stopping s) noexcept { return s == Stopping::bic ? "bic" : "fixed_k"; }

std::string_view to_string(Truncation t) noexcept { return t == Truncation::ln_n ? "ln_n" : "off"; }

Variant parse_variant(std::string_view s) {
    if (s == "aga") return Variant::aga;
    if (s == "oga") return Variant::oga;
    if (s == "rga") return Variant::rga;
    throw Error(ErrorCode::invalid_configuration, "unknown variant '" + std::string(s) + "'");
}

Stopping parse_stopping(std::string_view s) {
    if (s == "bic") return Stopping::bic;
    if (s == "fixed_k") return Stopping::fixed_k;
    throw Error(ErrorCode::invalid_configuration, "unknown stopping mode '" + std::string(s) + "'");
}

Truncation parse_truncation(std::string_view s) {
    if (s == "off") return Truncation::off;
    if (s == "ln_n") return Truncation::ln_n;
    throw Error(ErrorCode::invalid_configuration, "unknown truncation mode '" + std::string(s) + "'");
}

void validate(const FitConfig& c, std::optional<int> n, std::optional<int> p) {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_configuration, msg); };
    if (c.q < 1) fail("q must be >= 1");
    if (c.ell < 1) fail("ell must be >= 1");
    if (c.B < 1) fail("B must be >= 1");
    if (c.k_max < 1) fail("k_max must be >= 1");
    if (c.degree < 0) fail("degree must be >= 0");
    if (c.J < c.degree + 1) fail("J must be >= degree + 1");
    if (!(c.nu >= 0.0)) fail("nu must be non-negative");
    if (c.n_starts < 1) fail("n_starts must be >= 1");
    if (c.threads < 0) fail("threads must be >= 0");
    if (p && c.q > *p) fail("q=" + std::to_string(c.q) + " exceeds predictor count p=" + std::to_string(*p));
    if (n && *n <= c.J + c.q) {
        fail("sample size n=" + std::to_string(*n) + " must exceed J + q = " + std::to_string(c.J + c.q));
    }
}

}  // namespace eppr
