#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "eppr/rng.hpp"
#include "eppr/spline.hpp"

namespace eppr {

/// Affine map of raw projections onto the spline domain: lo -> -1, hi -> +1,
/// clamped outside.
struct ProjectionScaler {
    double lo = -1.0;
    double hi = 1.0;

    double slope() const noexcept { return 2.0 / (hi - lo); }
    double operator()(double u) const noexcept;
};

/// Below this training range a projection is treated as constant.
inline constexpr double kDegenerateRange = 1e-12;

/// One fitted ridge term g(theta^T x_subset).
struct Ridge {
    std::vector<int> subset;
    Eigen::VectorXd theta;
    ProjectionScaler scaler;
    Eigen::VectorXd coeffs;
    std::shared_ptr<const KnotVector> knots;
};

double project_and_scale(const Ridge& ridge, const Eigen::Ref<const Eigen::VectorXd>& x);
double eval_ridge(const Ridge& ridge, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Ridge values at every row of the full predictor matrix `X` (n x p).
Eigen::VectorXd eval_ridge_rows(const Ridge& ridge, const Eigen::MatrixXd& X);

/// Basis design (n x J) of the ridge's projections of the rows of `X`.
Eigen::MatrixXd ridge_design(const Ridge& ridge, const Eigen::MatrixXd& X);

/// Flip theta so its largest-magnitude component is non-negative, keeping the
/// represented function unchanged.
void canonicalize_sign(Ridge& ridge);

struct SingleIndexOptions {
    int n_starts = 5;
    int max_alternations = 20;
    int max_halvings = 10;
    double rel_tol = 1e-6;
    /// Draws the random starts; may be null when n_starts == 1.
    Rng* rng = nullptr;
    /// Extra start tried before all others (used by cyclic refinement).
    std::optional<Eigen::VectorXd> warm_start;
};

struct SingleIndexFit {
    Ridge ridge;
    double sse = 0.0;
    /// Per start, the SSE after each coefficient solve.
    std::vector<std::vector<double>> traces;
    int best_start = 0;
};

/// Fits min over unit theta and spline coefficients of
/// sum_i (residuals_i - g(scale(theta^T X_i)))^2 by alternating a damped LS
/// solve for the coefficients with a step-halved Gauss-Newton update of
/// theta, over several starts. The returned ridge's subset is 0..q-1; callers
/// relabel it.
SingleIndexFit fit_single_index(const Eigen::MatrixXd& X_sub, const Eigen::VectorXd& residuals,
                                std::shared_ptr<const KnotVector> kv, const SingleIndexOptions& opts);

}  // namespace eppr
