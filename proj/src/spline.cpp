#include "eppr/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "eppr/error.hpp"

namespace eppr {

namespace {

constexpr int kMaxDegree = 15;

void check_domain(double v) {
    if (!(v >= -1.0 && v <= 1.0)) {
        throw Error(ErrorCode::domain, "spline argument outside [-1, 1]: " + std::to_string(v));
    }
}

// Nonzero basis functions of the given degree on span mu, written to
// vals[0..degree] (they belong to B_{mu-degree} .. B_mu).
void nonzero_basis(const std::vector<double>& t, int mu, int degree, double v, double* vals) {
    std::array<double, kMaxDegree + 1> left{};
    std::array<double, kMaxDegree + 1> right{};
    vals[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = v - t[mu + 1 - j];
        right[j] = t[mu + j] - v;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = vals[r] / denom;
            vals[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        vals[j] = saved;
    }
}

}  // namespace

KnotVector::KnotVector(int basis_count, int degree) : degree_(degree), basis_count_(basis_count) {
    if (degree < 0 || degree > kMaxDegree) {
        throw Error(ErrorCode::invalid_configuration,
                    "spline degree must lie in [0, " + std::to_string(kMaxDegree) + "]");
    }
    if (basis_count < degree + 1) {
        throw Error(ErrorCode::invalid_configuration,
                    "basis count J=" + std::to_string(basis_count) + " is smaller than degree+1=" +
                        std::to_string(degree + 1));
    }
    const int interior = basis_count - degree - 1;
    knots_.reserve(static_cast<std::size_t>(basis_count + degree + 1));
    knots_.insert(knots_.end(), static_cast<std::size_t>(degree + 1), -1.0);
    const int cells = interior + 1;
    for (int i = 1; i <= interior; ++i) {
        knots_.push_back(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(cells));
    }
    knots_.insert(knots_.end(), static_cast<std::size_t>(degree + 1), 1.0);
}

int KnotVector::find_span(double v) const noexcept {
    // Spans live in [degree, basis_count - 1]; v == 1 maps to the last one.
    const int last = basis_count_ - 1;
    if (v >= knots_[static_cast<std::size_t>(last + 1)]) return last;
    const auto first = knots_.begin() + degree_ + 1;
    const auto end = knots_.begin() + last + 1;
    const auto it = std::upper_bound(first, end, v);
    return static_cast<int>(it - knots_.begin()) - 1;
}

KnotVector make_uniform_knots(int basis_count, int degree) { return KnotVector(basis_count, degree); }

void eval_basis_into(const KnotVector& kv, double v, std::span<double> out) {
    check_domain(v);
    std::fill(out.begin(), out.end(), 0.0);
    const int p = kv.degree();
    const int mu = kv.find_span(v);
    std::array<double, kMaxDegree + 1> vals{};
    nonzero_basis(kv.knots(), mu, p, v, vals.data());
    for (int r = 0; r <= p; ++r) out[static_cast<std::size_t>(mu - p + r)] = vals[r];
}

void eval_basis_deriv_into(const KnotVector& kv, double v, std::span<double> out) {
    const int p = kv.degree();
    if (p == 0) {
        throw Error(ErrorCode::unsupported, "basis derivative requires degree >= 1");
    }
    check_domain(v);
    std::fill(out.begin(), out.end(), 0.0);
    const auto& t = kv.knots();
    const int mu = kv.find_span(v);
    std::array<double, kMaxDegree + 1> lower{};
    nonzero_basis(t, mu, p - 1, v, lower.data());
    // B'_{i,p} = p * (B_{i,p-1} / (t_{i+p} - t_i) - B_{i+1,p-1} / (t_{i+p+1} - t_{i+1})).
    // lower[r] holds B_{mu-p+1+r, p-1}.
    for (int r = 0; r <= p; ++r) {
        const int i = mu - p + r;
        double d = 0.0;
        if (r >= 1) {
            const double h = t[static_cast<std::size_t>(i + p)] - t[static_cast<std::size_t>(i)];
            if (h > 0.0) d += lower[r - 1] / h;
        }
        if (r <= p - 1) {
            const double h = t[static_cast<std::size_t>(i + p + 1)] - t[static_cast<std::size_t>(i + 1)];
            if (h > 0.0) d -= lower[r] / h;
        }
        out[static_cast<std::size_t>(i)] = p * d;
    }
}

std::vector<double> eval_basis(const KnotVector& kv, double v) {
    std::vector<double> out(static_cast<std::size_t>(kv.basis_count()));
    eval_basis_into(kv, v, out);
    return out;
}

std::vector<double> eval_basis_deriv(const KnotVector& kv, double v) {
    std::vector<double> out(static_cast<std::size_t>(kv.basis_count()));
    eval_basis_deriv_into(kv, v, out);
    return out;
}

double eval_spline(const KnotVector& kv, std::span<const double> coeffs, double v) {
    check_domain(v);
    const int p = kv.degree();
    const int mu = kv.find_span(v);
    std::array<double, kMaxDegree + 1> vals{};
    nonzero_basis(kv.knots(), mu, p, v, vals.data());
    double s = 0.0;
    for (int r = 0; r <= p; ++r) s += coeffs[static_cast<std::size_t>(mu - p + r)] * vals[r];
    return s;
}

double eval_spline_deriv(const KnotVector& kv, std::span<const double> coeffs, double v) {
    const int p = kv.degree();
    if (p == 0) return 0.0;
    check_domain(v);
    const auto& t = kv.knots();
    const int mu = kv.find_span(v);
    std::array<double, kMaxDegree + 1> lower{};
    nonzero_basis(t, mu, p - 1, v, lower.data());
    // Derivative of a spline is a degree p-1 spline with differenced coefficients.
    double s = 0.0;
    for (int r = 0; r < p; ++r) {
        const int i = mu - p + 1 + r;
        const double h = t[static_cast<std::size_t>(i + p)] - t[static_cast<std::size_t>(i)];
        if (h > 0.0) {
            s += p * (coeffs[static_cast<std::size_t>(i)] - coeffs[static_cast<std::size_t>(i - 1)]) / h * lower[r];
        }
    }
    return s;
}

}  // namespace eppr
