#include "eppr/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "eppr/error.hpp"
#include "eppr/numerics.hpp"

namespace eppr {

double PprModel::predict_row(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double s = intercept;
    for (std::size_t t = 0; t < ridges.size(); ++t) s += weights[t] * eval_ridge(ridges[t], x);
    return s;
}

Eigen::VectorXd PprModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), intercept);
    for (std::size_t t = 0; t < ridges.size(); ++t) out += weights[t] * eval_ridge_rows(ridges[t], X);
    return out;
}

std::vector<std::vector<int>> select_candidate_subsets(int p, int q, int ell, Rng& rng) {
    if (q < 1 || q > p) {
        throw Error(ErrorCode::invalid_configuration,
                    "subset size q=" + std::to_string(q) + " must lie in [1, p=" + std::to_string(p) + "]");
    }
    if (ell < 1) throw Error(ErrorCode::invalid_configuration, "candidate count ell must be >= 1");
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(ell));
    std::vector<int> pool(static_cast<std::size_t>(p));
    for (int l = 0; l < ell; ++l) {
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates: the first q slots become a uniform q-combination.
        for (int i = 0; i < q; ++i) {
            std::uniform_int_distribution<int> pick(i, p - 1);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<int> subset(pool.begin(), pool.begin() + q);
        std::sort(subset.begin(), subset.end());
        out.push_back(std::move(subset));
    }
    return out;
}

double relaxation_alpha(int k) noexcept { return 1.0 - 2.0 / (static_cast<double>(k) + 2.0); }

double bic_value(int tau, double sse, int n, int q, int J, double nu) {
    const double dn = static_cast<double>(n);
    return sse / dn + static_cast<double>(tau) * std::log(dn) * (q + std::pow(static_cast<double>(J), 1.0 + nu)) / dn;
}

Eigen::VectorXd refit_term_scales(const std::vector<Eigen::VectorXd>& columns, const Eigen::VectorXd& target) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(columns.size()));
    std::vector<std::size_t> active;
    for (std::size_t t = 0; t < columns.size(); ++t) {
        if (columns[t].squaredNorm() > 0.0) active.push_back(t);
    }
    if (active.empty()) return c;
    Eigen::MatrixXd design(target.size(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) design.col(static_cast<Eigen::Index>(a)) = columns[active[a]];
    const LsSolution sol = solve_ridge_ls(design, target, 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) c[static_cast<Eigen::Index>(active[a])] = sol.coefficients[static_cast<Eigen::Index>(a)];
    return c;
}

GreedyState::GreedyState(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config)
    : X_(X), config_(config) {
    if (X.rows() != y.size()) throw Error(ErrorCode::shape, "predictor rows and response length differ");
    if (X.cols() < 1) throw Error(ErrorCode::invalid_input, "no predictors");
    validate(config, static_cast<int>(X.rows()), static_cast<int>(X.cols()));
    if (!X.allFinite() || !y.allFinite()) throw Error(ErrorCode::invalid_input, "non-finite training data");
    model_.variant = config.variant;
    model_.intercept = y.mean();
    centered_ = y.array() - model_.intercept;
    knots_ = std::make_shared<const KnotVector>(config.J, config.degree);
    fitted_ = Eigen::VectorXd::Zero(y.size());
}

GreedyState::Candidate GreedyState::best_candidate(const Eigen::VectorXd& target, Rng& rng) const {
    const int p = static_cast<int>(X_.cols());
    const auto subsets = select_candidate_subsets(p, config_.q, config_.ell, rng);
    SingleIndexOptions opts;
    opts.n_starts = config_.n_starts;
    opts.rng = &rng;

    std::optional<Candidate> best;
    Eigen::MatrixXd sub(X_.rows(), config_.q);
    for (std::size_t l = 0; l < subsets.size(); ++l) {
        const auto& subset = subsets[l];
        for (int j = 0; j < config_.q; ++j) sub.col(j) = X_.col(subset[static_cast<std::size_t>(j)]);
        SingleIndexFit fit;
        try {
            fit = fit_single_index(sub, target, knots_, opts);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::invalid_configuration) throw;
            continue;
        }
        if (!std::isfinite(fit.sse)) continue;
        if (!best || fit.sse < best->sse) {
            fit.ridge.subset = subset;
            best = Candidate{std::move(fit.ridge), fit.sse, static_cast<int>(l)};
        }
    }
    if (!best) {
        // Every candidate failed: a zero ridge on the first subset keeps traces uniform.
        best = Candidate{zero_ridge(subsets.front()), std::numeric_limits<double>::quiet_NaN(), -1};
    }
    return std::move(*best);
}

Ridge GreedyState::zero_ridge(const std::vector<int>& subset) const {
    Ridge r;
    r.subset = subset;
    r.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(subset.size()));
    r.theta[0] = 1.0;
    const auto col = X_.col(subset.front());
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    r.scaler = hi - lo >= kDegenerateRange ? ProjectionScaler{lo, hi} : ProjectionScaler{lo - 1.0, lo + 1.0};
    r.coeffs = Eigen::VectorXd::Zero(knots_->basis_count());
    r.knots = knots_;
    return r;
}

void GreedyState::record(int chosen, double objective, double padded) {
    const int tau = model_.k();
    const double s = sse();
    model_.bic_trace.push_back(
        BicPoint{tau, s, bic_value(tau, s, static_cast<int>(X_.rows()), config_.q, config_.J, config_.nu)});
    model_.diagnostics.push_back(StepDiagnostics{tau, s, objective, padded, chosen});
}

void GreedyState::step_aga(Rng& rng) {
    const Eigen::VectorXd e = residuals();
    auto cand = best_candidate(e, rng);
    const bool productive = cand.index >= 0;
    const int J = knots_->basis_count();
    const Eigen::Index n = X_.rows();

    model_.ridges.push_back(std::move(cand.ridge));
    model_.weights.push_back(1.0);
    designs_.push_back(productive ? ridge_design(model_.ridges.back(), X_) : Eigen::MatrixXd::Zero(n, J));

    const int tau = model_.k();
    Eigen::MatrixXd stacked(n, static_cast<Eigen::Index>(tau) * J);
    Eigen::VectorXd previous(static_cast<Eigen::Index>(tau) * J);
    previous.setZero();
    for (int t = 0; t < tau; ++t) {
        stacked.middleCols(static_cast<Eigen::Index>(t) * J, J) = designs_[static_cast<std::size_t>(t)];
        if (t < tau - 1) previous.segment(static_cast<Eigen::Index>(t) * J, J) = model_.ridges[static_cast<std::size_t>(t)].coeffs;
    }
    const double damping = default_damping(stacked);
    const double padded = (centered_ - fitted_).squaredNorm() + damping * previous.squaredNorm();
    const LsSolution sol = solve_ridge_ls(stacked, centered_, damping);
    for (int t = 0; t < tau; ++t) {
        model_.ridges[static_cast<std::size_t>(t)].coeffs = sol.coefficients.segment(static_cast<Eigen::Index>(t) * J, J);
    }
    fitted_ = stacked * sol.coefficients;
    record(productive ? cand.index : -1, sol.sse + sol.damping * sol.coefficients.squaredNorm(), padded);
}

void GreedyState::step_oga(Rng& rng) {
    const Eigen::VectorXd e = residuals();
    auto cand = best_candidate(e, rng);
    bool productive = cand.index >= 0;
    Ridge ridge = std::move(cand.ridge);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(X_.rows());
    if (productive) {
        values = eval_ridge_rows(ridge, X_);
        const double norm = std::sqrt(values.squaredNorm() / static_cast<double>(values.size()));
        if (norm > 1e-12) {
            ridge.coeffs /= norm;
            values /= norm;
        } else {
            ridge.coeffs.setZero();
            values.setZero();
            productive = false;
        }
    }
    model_.ridges.push_back(std::move(ridge));
    term_values_.push_back(std::move(values));

    const Eigen::VectorXd c = refit_term_scales(term_values_, centered_);
    model_.weights.assign(c.data(), c.data() + c.size());
    fitted_.setZero();
    for (std::size_t t = 0; t < term_values_.size(); ++t) fitted_ += c[static_cast<Eigen::Index>(t)] * term_values_[t];
    const double objective = sse();
    const double previous_sse = e.squaredNorm();
    record(productive ? cand.index : -1, objective, previous_sse);
}

void GreedyState::step_rga(Rng& rng) {
    const int k = model_.k() + 1;
    const double alpha = relaxation_alpha(k);
    const Eigen::VectorXd shrunk = alpha * fitted_;
    const Eigen::VectorXd e = centered_ - shrunk;
    auto cand = best_candidate(e, rng);
    const bool productive = cand.index >= 0;
    Eigen::VectorXd values = productive ? eval_ridge_rows(cand.ridge, X_) : Eigen::VectorXd::Zero(X_.rows());
    for (double& w : model_.weights) w *= alpha;
    model_.weights.push_back(1.0);
    model_.ridges.push_back(std::move(cand.ridge));
    fitted_ = shrunk + values;
    term_values_.push_back(std::move(values));
    const double s = sse();
    record(productive ? cand.index : -1, s, s);
}

void GreedyState::step(Rng& rng) {
    switch (config_.variant) {
        case Variant::aga: step_aga(rng); break;
        case Variant::oga: step_oga(rng); break;
        case Variant::rga: step_rga(rng); break;
    }
}

void greedy_step_aga(GreedyState& state, Rng& rng) { state.step_aga(rng); }
void greedy_step_oga(GreedyState& state, Rng& rng) { state.step_oga(rng); }
void greedy_step_rga(GreedyState& state, Rng& rng) { state.step_rga(rng); }

PprModel run_greedy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config, Rng& rng) {
    GreedyState state(X, y, config);
    PprModel previous;
    for (int tau = 1; tau <= config.k_max; ++tau) {
        if (config.stopping == Stopping::bic && tau >= 2) previous = state.model();
        state.step(rng);
        if (config.stopping != Stopping::bic || tau < 2) continue;
        const auto& trace = state.model().bic_trace;
        if (trace[static_cast<std::size_t>(tau - 2)].bic < trace[static_cast<std::size_t>(tau - 1)].bic) {
            // First rise: keep tau-1 terms and drop the one just added.
            previous.bic_trace = trace;
            previous.diagnostics = state.model().diagnostics;
            return previous;
        }
    }
    return std::move(state).take_model();
}

PprModel fit_ppr_full(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int K, const FitConfig& config, Rng& rng) {
    if (K < 1) throw Error(ErrorCode::invalid_configuration, "K must be >= 1");
    const auto n = X.rows();
    const auto p = X.cols();
    if (n <= static_cast<Eigen::Index>(K) * config.J + static_cast<Eigen::Index>(K) * p) {
        throw Error(ErrorCode::invalid_configuration, "full PPR fit needs n > K*J + K*p");
    }
    FitConfig full = config;
    full.variant = Variant::aga;
    full.q = static_cast<int>(p);
    full.ell = 1;
    full.stopping = Stopping::fixed_k;
    full.k_max = K;

    GreedyState state(X, y, full);
    for (int tau = 1; tau <= K; ++tau) state.step_aga(rng);
    PprModel model = std::move(state).take_model();
    if (K == 1) return model;

    const Eigen::VectorXd centered = y.array() - model.intercept;
    std::vector<Eigen::VectorXd> values;
    for (const auto& r : model.ridges) values.push_back(eval_ridge_rows(r, X));
    auto total = [&] {
        Eigen::VectorXd s = centered;
        for (const auto& v : values) s -= v;
        return s.squaredNorm();
    };
    double best = total();

    SingleIndexOptions opts;
    opts.n_starts = config.n_starts;
    opts.rng = &rng;
    for (int pass = 0; pass < 5; ++pass) {
        std::vector<Ridge> saved_ridges = model.ridges;
        std::vector<Eigen::VectorXd> saved_values = values;
        for (std::size_t k = 0; k < model.ridges.size(); ++k) {
            Eigen::VectorXd partial = centered;
            for (std::size_t j = 0; j < values.size(); ++j) {
                if (j != k) partial -= values[j];
            }
            opts.warm_start = model.ridges[k].theta;
            SingleIndexFit fit = fit_single_index(X, partial, model.ridges[k].knots, opts);
            model.ridges[k] = std::move(fit.ridge);
            values[k] = eval_ridge_rows(model.ridges[k], X);
        }
        const double s = total();
        if (!(s < best)) {
            model.ridges = std::move(saved_ridges);
            values = std::move(saved_values);
            break;
        }
        best = s;
    }
    model.weights.assign(model.ridges.size(), 1.0);
    return model;
}

}  // namespace eppr
