#include "eppr/single_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "eppr/error.hpp"
#include "eppr/numerics.hpp"

namespace eppr {

double ProjectionScaler::operator()(double u) const noexcept {
    const double z = 2.0 * (u - lo) / (hi - lo) - 1.0;
    return std::clamp(z, -1.0, 1.0);
}

double project_and_scale(const Ridge& ridge, const Eigen::Ref<const Eigen::VectorXd>& x) {
    double u = 0.0;
    for (std::size_t j = 0; j < ridge.subset.size(); ++j) {
        u += ridge.theta[static_cast<Eigen::Index>(j)] * x[ridge.subset[j]];
    }
    return ridge.scaler(u);
}

double eval_ridge(const Ridge& ridge, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double z = project_and_scale(ridge, x);
    return eval_spline(*ridge.knots, {ridge.coeffs.data(), static_cast<std::size_t>(ridge.coeffs.size())}, z);
}

Eigen::VectorXd eval_ridge_rows(const Ridge& ridge, const Eigen::MatrixXd& X) {
    Eigen::VectorXd out(X.rows());
    const std::span<const double> c(ridge.coeffs.data(), static_cast<std::size_t>(ridge.coeffs.size()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double u = 0.0;
        for (std::size_t j = 0; j < ridge.subset.size(); ++j) {
            u += ridge.theta[static_cast<Eigen::Index>(j)] * X(i, ridge.subset[j]);
        }
        out[i] = eval_spline(*ridge.knots, c, ridge.scaler(u));
    }
    return out;
}

Eigen::MatrixXd ridge_design(const Ridge& ridge, const Eigen::MatrixXd& X) {
    const int J = ridge.knots->basis_count();
    Eigen::MatrixXd design(X.rows(), J);
    std::vector<double> row(static_cast<std::size_t>(J));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double u = 0.0;
        for (std::size_t j = 0; j < ridge.subset.size(); ++j) {
            u += ridge.theta[static_cast<Eigen::Index>(j)] * X(i, ridge.subset[j]);
        }
        eval_basis_into(*ridge.knots, ridge.scaler(u), row);
        for (int j = 0; j < J; ++j) design(i, j) = row[static_cast<std::size_t>(j)];
    }
    return design;
}

void canonicalize_sign(Ridge& ridge) {
    Eigen::Index arg = 0;
    ridge.theta.cwiseAbs().maxCoeff(&arg);
    if (ridge.theta[arg] >= 0.0) return;
    // theta -> -theta negates raw projections; the scaler mirrors and, since
    // the knots are symmetric about 0, B_j(-z) = B_{J-1-j}(z).
    ridge.theta = -ridge.theta;
    ridge.scaler = ProjectionScaler{-ridge.scaler.hi, -ridge.scaler.lo};
    ridge.coeffs.reverseInPlace();
}

namespace {

struct Profile {
    ProjectionScaler scaler;
    Eigen::VectorXd coeffs;
    Eigen::VectorXd z;
    double sse = 0.0;
    bool degenerate = false;
};

// Best coefficients for a fixed direction: refresh the scaler from the
// training projections and solve the damped LS problem.
Profile profile(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, const KnotVector& kv,
                const Eigen::VectorXd& theta) {
    Profile out;
    const Eigen::VectorXd u = X * theta;
    const double lo = u.minCoeff();
    const double hi = u.maxCoeff();
    const int J = kv.basis_count();
    if (!(hi - lo >= kDegenerateRange)) {
        const double mean = e.mean();
        out.degenerate = true;
        out.scaler = ProjectionScaler{lo - 1.0, lo + 1.0};
        out.coeffs = Eigen::VectorXd::Constant(J, mean);
        out.z = Eigen::VectorXd::Zero(u.size());
        out.sse = (e.array() - mean).square().sum();
        return out;
    }
    out.scaler = ProjectionScaler{lo, hi};
    out.z.resize(u.size());
    Eigen::MatrixXd design(u.size(), J);
    std::vector<double> row(static_cast<std::size_t>(J));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        out.z[i] = out.scaler(u[i]);
        eval_basis_into(kv, out.z[i], row);
        for (int j = 0; j < J; ++j) design(i, j) = row[static_cast<std::size_t>(j)];
    }
    LsSolution sol = solve_ridge_ls_default(design, e);
    out.coeffs = std::move(sol.coefficients);
    out.sse = sol.sse;
    return out;
}

Eigen::VectorXd random_unit(Rng& rng, Eigen::Index q) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(q);
    for (;;) {
        for (Eigen::Index j = 0; j < q; ++j) v[j] = normal(rng);
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

Eigen::VectorXd first_axis(Eigen::Index q) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(q);
    v[0] = 1.0;
    return v;
}

// Ordinary LS direction of e on the centered columns of X.
std::optional<Eigen::VectorXd> ls_direction(const Eigen::MatrixXd& X, const Eigen::VectorXd& e) {
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    const Eigen::VectorXd ec = e.array() - e.mean();
    if (ec.squaredNorm() == 0.0 || centered.squaredNorm() == 0.0) return std::nullopt;
    const LsSolution sol = solve_ridge_ls_default(centered, ec);
    const double n = sol.coefficients.norm();
    if (!(n > 1e-300) || !sol.coefficients.allFinite()) return std::nullopt;
    return Eigen::VectorXd(sol.coefficients / n);
}

struct StartResult {
    Eigen::VectorXd theta;
    Profile prof;
    std::vector<double> trace;
};

StartResult run_start(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, const KnotVector& kv,
                      Eigen::VectorXd theta, const SingleIndexOptions& opts) {
    StartResult res;
    Profile cur = profile(X, e, kv, theta);
    res.trace.push_back(cur.sse);
    const bool can_step = kv.degree() >= 1;

    for (int it = 1; it < opts.max_alternations && can_step && !cur.degenerate && cur.sse > 0.0; ++it) {
        const Eigen::Index n = X.rows();
        const Eigen::Index q = X.cols();
        const std::span<const double> c(cur.coeffs.data(), static_cast<std::size_t>(cur.coeffs.size()));
        const double slope = cur.scaler.slope();
        Eigen::VectorXd r(n);
        Eigen::MatrixXd jac(n, q);
        for (Eigen::Index i = 0; i < n; ++i) {
            r[i] = e[i] - eval_spline(kv, c, cur.z[i]);
            jac.row(i) = (eval_spline_deriv(kv, c, cur.z[i]) * slope) * X.row(i);
        }
        const auto proposal = gauss_newton_sphere_step(theta, r, jac);
        if (!proposal) break;
        const Eigen::VectorXd delta = *proposal - theta;
        if (delta.squaredNorm() == 0.0) break;

        bool accepted = false;
        double step = 1.0;
        for (int h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
            Eigen::VectorXd trial = theta + step * delta;
            const double tn = trial.norm();
            if (!(tn > 0.0)) continue;
            trial /= tn;
            Profile cand = profile(X, e, kv, trial);
            if (cand.sse < cur.sse) {
                theta = std::move(trial);
                const double improvement = (cur.sse - cand.sse) / cur.sse;
                cur = std::move(cand);
                res.trace.push_back(cur.sse);
                accepted = improvement >= opts.rel_tol;
                break;
            }
        }
        if (!accepted) break;
    }
    res.theta = std::move(theta);
    res.prof = std::move(cur);
    return res;
}

}  // namespace

SingleIndexFit fit_single_index(const Eigen::MatrixXd& X_sub, const Eigen::VectorXd& residuals,
                                std::shared_ptr<const KnotVector> kv, const SingleIndexOptions& opts) {
    if (!kv) throw Error(ErrorCode::invalid_configuration, "single-index fit needs a knot vector");
    const Eigen::Index n = X_sub.rows();
    const Eigen::Index q = X_sub.cols();
    const int J = kv->basis_count();
    if (q < 1) throw Error(ErrorCode::invalid_configuration, "single-index fit needs q >= 1 columns");
    if (residuals.size() != n) throw Error(ErrorCode::shape, "residual length differs from row count");
    if (n <= J + q) {
        throw Error(ErrorCode::invalid_configuration,
                    "single-index fit needs n > J + q (n=" + std::to_string(n) + ", J=" + std::to_string(J) +
                        ", q=" + std::to_string(q) + ")");
    }
    if (!X_sub.allFinite() || !residuals.allFinite()) {
        throw Error(ErrorCode::invalid_input, "non-finite entries in single-index inputs");
    }
    if (opts.n_starts < 1) throw Error(ErrorCode::invalid_configuration, "n_starts must be >= 1");

    SingleIndexFit fit;
    fit.ridge.subset.resize(static_cast<std::size_t>(q));
    std::iota(fit.ridge.subset.begin(), fit.ridge.subset.end(), 0);
    fit.ridge.knots = kv;

    if (residuals.squaredNorm() == 0.0) {
        fit.ridge.theta = first_axis(q);
        const Eigen::VectorXd u = X_sub.col(0);
        const double lo = u.minCoeff();
        const double hi = u.maxCoeff();
        fit.ridge.scaler = hi - lo >= kDegenerateRange ? ProjectionScaler{lo, hi} : ProjectionScaler{lo - 1.0, lo + 1.0};
        fit.ridge.coeffs = Eigen::VectorXd::Zero(J);
        fit.sse = 0.0;
        fit.traces.push_back({0.0});
        return fit;
    }

    std::vector<Eigen::VectorXd> starts;
    if (opts.warm_start) {
        if (opts.warm_start->size() != q) throw Error(ErrorCode::shape, "warm start has wrong dimension");
        starts.push_back(opts.warm_start->normalized());
    }
    for (int s = 0; s < opts.n_starts; ++s) {
        if (s == 0) {
            auto dir = ls_direction(X_sub, residuals);
            if (dir) {
                starts.push_back(std::move(*dir));
                continue;
            }
        }
        if (opts.rng == nullptr) {
            if (s == 0) starts.push_back(first_axis(q));
            continue;
        }
        starts.push_back(random_unit(*opts.rng, q));
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < starts.size(); ++s) {
        StartResult res = run_start(X_sub, residuals, *kv, starts[s], opts);
        fit.traces.push_back(res.trace);
        if (res.prof.sse < best) {
            best = res.prof.sse;
            fit.best_start = static_cast<int>(s);
            fit.ridge.theta = std::move(res.theta);
            fit.ridge.scaler = res.prof.scaler;
            fit.ridge.coeffs = std::move(res.prof.coeffs);
        }
    }
    fit.sse = best;
    canonicalize_sign(fit.ridge);
    return fit;
}

}  // namespace eppr
