#include "eppr/numerics.hpp"

#include <cmath>

#include "eppr/error.hpp"

namespace eppr {

namespace {

constexpr double kSingularTol = 1e-10;

double mean_diag(const Eigen::MatrixXd& gram) {
    return gram.diagonal().mean();
}

bool gram_singular(const Eigen::MatrixXd& gram) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) return true;
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const double dmax = d.maxCoeff();
    return !(dmax > 0.0) || d.minCoeff() <= kSingularTol * dmax;
}

}  // namespace

double default_damping(const Eigen::MatrixXd& design) {
    return kRelativeDamping * design.colwise().squaredNorm().mean();
}

LsSolution solve_ridge_ls(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, double damping) {
    if (design.rows() < 1 || design.cols() < 1) {
        throw Error(ErrorCode::invalid_input, "least-squares design must be non-empty");
    }
    if (design.rows() != target.size()) {
        throw Error(ErrorCode::shape, "least-squares design and target row counts differ");
    }
    if (!(damping >= 0.0) || !std::isfinite(damping)) {
        throw Error(ErrorCode::invalid_input, "damping must be finite and non-negative");
    }
    if (!design.allFinite() || !target.allFinite()) {
        throw Error(ErrorCode::invalid_input, "non-finite entries in least-squares inputs");
    }

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(design.cols(), design.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
    gram.triangularView<Eigen::Upper>() = gram.transpose();
    const Eigen::VectorXd rhs = design.transpose() * target;

    LsSolution sol;
    sol.rank_deficient = gram_singular(gram);

    double lambda = damping;
    Eigen::MatrixXd damped = gram;
    damped.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(damped);
    if (llt.info() != Eigen::Success) {
        // Undamped and singular: fall back to the default relative damping.
        lambda = std::max(lambda, kRelativeDamping * std::max(mean_diag(gram), 1.0));
        damped = gram;
        damped.diagonal().array() += lambda;
        llt.compute(damped);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::invalid_input, "least-squares system could not be factored");
        }
    }
    sol.coefficients = llt.solve(rhs);
    sol.damping = lambda;
    sol.sse = (target - design * sol.coefficients).squaredNorm();
    return sol;
}

LsSolution solve_ridge_ls_default(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    return solve_ridge_ls(design, target, default_damping(design));
}

std::optional<Eigen::VectorXd> gauss_newton_sphere_step(const Eigen::VectorXd& theta,
                                                        const Eigen::VectorXd& residuals,
                                                        const Eigen::MatrixXd& jacobian) {
    if (jacobian.rows() != residuals.size() || jacobian.cols() != theta.size()) {
        throw Error(ErrorCode::shape, "Gauss-Newton jacobian shape mismatch");
    }
    if (std::abs(theta.norm() - 1.0) > 1e-10) {
        throw Error(ErrorCode::invalid_input, "Gauss-Newton theta must have unit norm");
    }
    const Eigen::VectorXd grad = jacobian.transpose() * residuals;
    if (grad.squaredNorm() == 0.0) return theta;
    if (!grad.allFinite()) return std::nullopt;

    const Eigen::MatrixXd gram = jacobian.transpose() * jacobian;
    double lambda = kRelativeDamping * mean_diag(gram);
    if (!(lambda > 0.0)) lambda = kRelativeDamping;
    for (int attempt = 0; attempt <= 6; ++attempt, lambda *= 10.0) {
        Eigen::MatrixXd damped = gram;
        damped.diagonal().array() += lambda;
        const Eigen::LLT<Eigen::MatrixXd> llt(damped);
        if (llt.info() != Eigen::Success) continue;
        const Eigen::VectorXd delta = llt.solve(grad);
        if (!delta.allFinite()) continue;
        const Eigen::VectorXd moved = theta + delta;
        const double norm = moved.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
        return moved / norm;
    }
    return std::nullopt;
}

}  // namespace eppr
