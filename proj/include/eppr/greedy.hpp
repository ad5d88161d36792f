#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "eppr/config.hpp"
#include "eppr/rng.hpp"
#include "eppr/single_index.hpp"

namespace eppr {

struct BicPoint {
    int tau = 0;
    double sse = 0.0;
    double bic = 0.0;
};

/// Training-time bookkeeping for one greedy step; not serialized.
struct StepDiagnostics {
    int tau = 0;
    double sse = 0.0;
    /// aga: damped joint objective after the refit, and the objective of the
    /// previous coefficients padded with zeros under the same damping.
    double objective = 0.0;
    double padded_objective = 0.0;
    int chosen_candidate = -1;  // -1: unproductive step
};

/// One greedy run: intercept + sum_tau weights[tau] * g_tau(theta_tau^T x_A_tau).
struct PprModel {
    double intercept = 0.0;
    std::vector<Ridge> ridges;
    Variant variant = Variant::aga;
    /// Per-term multiplier: 1 for aga, c_tau for oga, the cumulative
    /// relaxation product for rga.
    std::vector<double> weights;
    std::vector<BicPoint> bic_trace;
    std::vector<StepDiagnostics> diagnostics;

    int k() const noexcept { return static_cast<int>(ridges.size()); }

    /// Prediction at one scaled predictor row.
    double predict_row(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// `ell` independent uniform q-subsets of {0..p-1}, each sorted ascending.
std::vector<std::vector<int>> select_candidate_subsets(int p, int q, int ell, Rng& rng);

/// Relaxation coefficient 1 - 2/(k+2).
double relaxation_alpha(int k) noexcept;

/// sse/n + tau*ln(n)*(q + J^(1+nu))/n.
double bic_value(int tau, double sse, int n, int q, int J, double nu);

/// LS scale coefficients c for fixed term columns (zero columns get c = 0).
Eigen::VectorXd refit_term_scales(const std::vector<Eigen::VectorXd>& columns, const Eigen::VectorXd& target);

/// Mutable state of a single greedy run over a fixed scaled design.
class GreedyState {
public:
    GreedyState(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config);

    const PprModel& model() const noexcept { return model_; }
    PprModel take_model() && { return std::move(model_); }
    const Eigen::VectorXd& fitted() const noexcept { return fitted_; }
    Eigen::VectorXd residuals() const { return centered_ - fitted_; }
    double sse() const { return (centered_ - fitted_).squaredNorm(); }
    int tau() const noexcept { return model_.k(); }
    const std::shared_ptr<const KnotVector>& knots() const noexcept { return knots_; }
    const Eigen::MatrixXd& X() const noexcept { return X_; }
    const Eigen::VectorXd& centered_target() const noexcept { return centered_; }
    const FitConfig& config() const noexcept { return config_; }

    /// Candidate search on `target`; returns the winning ridge with its subset
    /// relabeled to predictor indices. When every candidate fails the result
    /// is a zero ridge with index -1.
    struct Candidate {
        Ridge ridge;
        double sse = 0.0;
        int index = 0;
    };
    Candidate best_candidate(const Eigen::VectorXd& target, Rng& rng) const;

    void step_aga(Rng& rng);
    void step_oga(Rng& rng);
    void step_rga(Rng& rng);
    void step(Rng& rng);

private:
    Ridge zero_ridge(const std::vector<int>& subset) const;
    void record(int chosen, double objective, double padded);

    const Eigen::MatrixXd& X_;
    Eigen::VectorXd centered_;
    FitConfig config_;
    std::shared_ptr<const KnotVector> knots_;
    PprModel model_;
    Eigen::VectorXd fitted_;
    std::vector<Eigen::MatrixXd> designs_;      // aga: per-term basis designs
    std::vector<Eigen::VectorXd> term_values_;  // oga/rga: unweighted g_tau at the rows
};

void greedy_step_aga(GreedyState& state, Rng& rng);
void greedy_step_oga(GreedyState& state, Rng& rng);
void greedy_step_rga(GreedyState& state, Rng& rng);

/// Full greedy run with fixed-k or BIC stopping. X must already be scaled.
PprModel run_greedy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config, Rng& rng);

/// Joint-direction baseline: aga with the full predictor set for exactly K
/// terms, followed by up to five cyclic backfitting passes over
/// (theta_k, coefficients), each kept only if it lowers the training SSE.
PprModel fit_ppr_full(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int K, const FitConfig& config, Rng& rng);

}  // namespace eppr
