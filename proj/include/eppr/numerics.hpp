#pragma once

#include <optional>

#include <Eigen/Dense>

namespace eppr {

struct LsSolution {
    Eigen::VectorXd coefficients;
    double sse = 0.0;
    /// The undamped Gram matrix was numerically singular.
    bool rank_deficient = false;
    /// Damping actually used (can exceed the request when it was zero and
    /// the Gram matrix could not be factored).
    double damping = 0.0;
};

/// Relative damping used for every spline-coefficient solve.
inline constexpr double kRelativeDamping = 1e-8;

/// argmin_beta ||target - design*beta||^2 + damping*||beta||^2 through the
/// damped normal equations (Cholesky).
LsSolution solve_ridge_ls(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, double damping);

/// Same, with damping = kRelativeDamping * mean(diag(design^T design)).
LsSolution solve_ridge_ls_default(const Eigen::MatrixXd& design, const Eigen::VectorXd& target);

/// Damping the default rule picks for `design`.
double default_damping(const Eigen::MatrixXd& design);

/// One damped Gauss-Newton step for theta on the unit sphere.
///
/// `residuals` are target minus fitted values and `jacobian` holds
/// d(fitted)/d(theta) row by row. Solves (J^T J + lambda I) delta = J^T r and
/// returns normalize(theta + delta). Damping starts at kRelativeDamping times
/// the mean Gram diagonal and escalates tenfold up to six times when the
/// system will not factor; std::nullopt signals a failed step.
std::optional<Eigen::VectorXd> gauss_newton_sphere_step(const Eigen::VectorXd& theta,
                                                        const Eigen::VectorXd& residuals,
                                                        const Eigen::MatrixXd& jacobian);

}  // namespace eppr
