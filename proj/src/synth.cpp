#include "eppr/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "eppr/data_io.hpp"
#include "eppr/error.hpp"
#include "eppr/rng.hpp"

namespace eppr {

namespace {

// Phi^{-1}(0.9): class means at +-this along one axis give Bayes error 0.10.
constexpr double kGaussianShift = 1.2815515655446004;

Eigen::VectorXd unit_direction(Rng& rng, int q) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(q);
    do {
        for (int j = 0; j < q; ++j) v[j] = normal(rng);
    } while (v.norm() < 1e-8);
    v.normalize();
    return v;
}

std::string fmt_vec(const Eigen::VectorXd& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s + ")";
}

}  // namespace

Scenario parse_scenario(std::string_view name) {
    if (name == "single_index") return Scenario::single_index;
    if (name == "additive3") return Scenario::additive3;
    if (name == "ppr3") return Scenario::ppr3;
    if (name == "noise") return Scenario::noise;
    if (name == "two_gaussian") return Scenario::two_gaussian;
    throw Error(ErrorCode::invalid_configuration, "unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::single_index: return "single_index";
        case Scenario::additive3: return "additive3";
        case Scenario::ppr3: return "ppr3";
        case Scenario::noise: return "noise";
        case Scenario::two_gaussian: return "two_gaussian";
    }
    return "?";
}

int min_predictors(Scenario s) noexcept {
    switch (s) {
        case Scenario::additive3: return 6;
        case Scenario::ppr3: return 9;
        default: return 1;
    }
}

SynthData generate(Scenario scenario, int n, int p, double noise, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorCode::invalid_configuration, "n must be >= 1");
    if (p < min_predictors(scenario)) {
        throw Error(ErrorCode::invalid_configuration, std::string(to_string(scenario)) + " needs p >= " +
                                                          std::to_string(min_predictors(scenario)));
    }
    if (!(noise >= 0.0)) throw Error(ErrorCode::invalid_configuration, "noise must be non-negative");

    // Directions and data come from separate streams so n does not change the directions.
    Rng dir_rng = make_stream(seed, 0);
    Rng data_rng = make_stream(seed, 1);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    SynthData out;
    out.X.resize(n, p);
    out.y.resize(n);
    std::ostringstream doc;
    doc << "scenario: " << to_string(scenario) << "\nn: " << n << "\np: " << p << "\nseed: " << seed << '\n';

    if (scenario == Scenario::two_gaussian) {
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < n; ++i) {
            const int label = coin(data_rng) ? 1 : 0;
            for (int j = 0; j < p; ++j) out.X(i, j) = normal(data_rng);
            out.X(i, 0) += (label == 1 ? kGaussianShift : -kGaussianShift);
            out.y[i] = label;
        }
        doc << "response: y ~ Bernoulli(1/2) in {0,1}\n"
            << "predictors: x | y ~ N(mu_y, I_p), mu_1 = -mu_0 = " << format_double(kGaussianShift) << " * e_1\n"
            << "bayes_error: Phi(-" << format_double(kGaussianShift) << ") = 0.10\n"
            << "noise: ignored\n";
        out.description = doc.str();
        return out;
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) out.X(i, j) = unif(data_rng);
    }
    doc << "predictors: x ~ Uniform[-1,1]^p\nnoise_sd: " << format_double(noise) << '\n';

    switch (scenario) {
        case Scenario::single_index: {
            const Eigen::VectorXd theta = unit_direction(dir_rng, p);
            out.y = (2.0 * (out.X * theta).array()).sin();
            doc << "signal: sin(2 * theta^T x)\ntheta: " << fmt_vec(theta) << '\n';
            break;
        }
        case Scenario::additive3: {
            const double pi = std::numbers::pi;
            for (int i = 0; i < n; ++i) {
                const auto x = out.X.row(i);
                out.y[i] = 2.0 * std::sin(pi * x[0]) * std::cos(0.5 * pi * x[1]) + 3.0 * x[2] * x[3] +
                           2.0 * std::exp(-(x[4] * x[4] + x[5] * x[5]));
            }
            doc << "signal: 2 sin(pi x1) cos(pi x2 / 2) + 3 x3 x4 + 2 exp(-(x5^2 + x6^2))\n";
            break;
        }
        case Scenario::ppr3: {
            Eigen::VectorXd thetas[3];
            for (auto& t : thetas) t = unit_direction(dir_rng, 3);
            for (int i = 0; i < n; ++i) {
                const Eigen::VectorXd x = out.X.row(i).transpose();
                const double v1 = thetas[0].dot(x.segment(0, 3));
                const double v2 = thetas[1].dot(x.segment(3, 3));
                const double v3 = thetas[2].dot(x.segment(6, 3));
                out.y[i] = 2.0 * std::sin(2.0 * v1) + 2.0 * v2 * v2 + 1.5 * std::tanh(3.0 * v3);
            }
            doc << "signal: g1(theta1^T x[1..3]) + g2(theta2^T x[4..6]) + g3(theta3^T x[7..9])\n"
                << "g1: 2 sin(2v)\ng2: 2 v^2\ng3: 1.5 tanh(3v)\n"
                << "theta1: " << fmt_vec(thetas[0]) << "\ntheta2: " << fmt_vec(thetas[1])
                << "\ntheta3: " << fmt_vec(thetas[2]) << '\n';
            break;
        }
        case Scenario::noise:
            out.y.setZero();
            doc << "signal: 0 (y independent of x; expected RPE about 1)\n";
            break;
        case Scenario::two_gaussian:
            break;
    }
    for (int i = 0; i < n; ++i) out.y[i] += noise * normal(data_rng);
    out.description = doc.str();
    return out;
}

}  // namespace eppr
