#include "eppr/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "eppr/error.hpp"

namespace eppr {

namespace {

int floor_pow(int n, double e) {
    return static_cast<int>(std::floor(std::pow(static_cast<double>(n), e) + 1e-9));
}

}  // namespace

FitConfig default_config(int n, int p) {
    FitConfig c;
    c.q = std::max(1, std::min(2 * p / 3, floor_pow(n, 0.4)));
    c.q = std::min(c.q, std::max(p, 1));
    c.ell = std::max(1, p / c.q);
    c.B = 50;
    c.k_max = 20;
    c.degree = 3;
    c.J = std::clamp(floor_pow(n, 0.2) + 4, 6, 30);
    c.nu = 0.2;
    c.stopping = Stopping::bic;
    c.variant = Variant::aga;
    c.truncation = Truncation::off;
    return c;
}

EnsembleModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config) {
    validate(config, static_cast<int>(X.rows()), static_cast<int>(X.cols()));
    EnsembleModel model;
    model.config = config;
    model.scaling = fit_scaling(X);
    model.knots = std::make_shared<const KnotVector>(config.J, config.degree);
    const Eigen::MatrixXd scaled = apply_scaling(model.scaling, X);

    const auto B = static_cast<std::size_t>(config.B);
    model.members.resize(B);
    std::vector<std::exception_ptr> errors(B);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t b = next++; b < B; b = next++) {
            try {
                Rng rng = make_stream(config.seed, b);
                model.members[b] = run_greedy(scaled, y, config, rng);
            } catch (...) {
                errors[b] = std::current_exception();
            }
        }
    };
    unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1U, static_cast<unsigned>(B));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    for (auto& m : model.members) {
        for (auto& r : m.ridges) r.knots = model.knots;
    }

    if (config.truncation == Truncation::ln_n) {
        const double ln_n = std::log(static_cast<double>(X.rows()));
        model.truncation = std::max(ln_n, y.cwiseAbs().maxCoeff());
    }
    return model;
}

EnsembleModel fit(const Dataset& train, const FitConfig& config) { return fit(train.X, train.y, config); }

Eigen::MatrixXd predict_members(const EnsembleModel& model, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd scaled = apply_scaling(model.scaling, X);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(model.members.size()), X.rows());
    for (std::size_t b = 0; b < model.members.size(); ++b) {
        Eigen::VectorXd pred = model.members[b].predict(scaled);
        if (model.truncation) {
            const double t = *model.truncation;
            pred = pred.cwiseMax(-t).cwiseMin(t);
        }
        out.row(static_cast<Eigen::Index>(b)) = pred.transpose();
    }
    return out;
}

Eigen::VectorXd predict(const EnsembleModel& model, const Eigen::MatrixXd& X) {
    if (model.members.empty()) throw Error(ErrorCode::invalid_input, "ensemble has no members");
    const Eigen::MatrixXd per_member = predict_members(model, X);
    Eigen::VectorXd out(X.rows());
    std::vector<double> column(static_cast<std::size_t>(per_member.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index b = 0; b < per_member.rows(); ++b) column[static_cast<std::size_t>(b)] = per_member(b, i);
        std::sort(column.begin(), column.end());
        double s = 0.0;
        for (double v : column) s += v;
        out[i] = s / static_cast<double>(column.size());
        if (model.truncation) out[i] = std::clamp(out[i], -*model.truncation, *model.truncation);
    }
    return out;
}

int classify_value(double prediction) noexcept { return prediction > 0.5 ? 1 : 0; }

std::vector<int> classify(const EnsembleModel& model, const Eigen::MatrixXd& X) {
    const Eigen::VectorXd pred = predict(model, X);
    std::vector<int> out(static_cast<std::size_t>(pred.size()));
    for (Eigen::Index i = 0; i < pred.size(); ++i) out[static_cast<std::size_t>(i)] = classify_value(pred[i]);
    return out;
}

}  // namespace eppr
