#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "eppr/error.hpp"
#include "eppr/greedy.hpp"
#include "eppr/rng.hpp"
#include "oracles.hpp"

using namespace eppr;

namespace {

FitConfig small_config(Variant v, int q, int ell, int k_max, Stopping s = Stopping::fixed_k) {
    FitConfig c;
    c.variant = v;
    c.q = q;
    c.ell = ell;
    c.k_max = k_max;
    c.stopping = s;
    c.J = 8;
    c.degree = 3;
    c.n_starts = 3;
    return c;
}

Eigen::VectorXd noise(std::mt19937_64& rng, int n, double sd) {
    std::normal_distribution<double> d(0.0, sd);
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e[i] = d(rng);
    return e;
}

// Rows of X projected on theta, rescaled so the sample range is [-1, 1].
Eigen::VectorXd scaled_projection(const Eigen::MatrixXd& X, const Eigen::VectorXd& theta) {
    const Eigen::VectorXd u = X * theta;
    const double lo = u.minCoeff();
    const double hi = u.maxCoeff();
    return (2.0 * (u.array() - lo) / (hi - lo) - 1.0).matrix();
}

double rpe(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
    return (y - pred).squaredNorm() / (y.array() - y.mean()).matrix().squaredNorm();
}

}  // namespace

TEST_CASE("select_candidate_subsets: q = p yields the full set") {
    Rng rng(3);
    const auto s = select_candidate_subsets(5, 5, 1, rng);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("select_candidate_subsets: singletons are uniform") {
    Rng rng(11);
    const auto s = select_candidate_subsets(2, 1, 1000, rng);
    REQUIRE(s.size() == 1000);
    int zeros = 0;
    for (const auto& a : s) {
        REQUIRE(a.size() == 1);
        zeros += a[0] == 0;
    }
    CHECK(std::abs(zeros / 1000.0 - 0.5) <= 0.05);
}

TEST_CASE("select_candidate_subsets: pairs of 5 are uniform over the 10 combinations") {
    Rng rng(5);
    std::map<std::vector<int>, int> counts;
    const int draws = 20000;
    for (const auto& a : select_candidate_subsets(5, 2, draws, rng)) {
        REQUIRE(a.size() == 2);
        CHECK(a[0] < a[1]);
        CHECK(a[0] >= 0);
        CHECK(a[1] < 5);
        ++counts[a];
    }
    CHECK(counts.size() == 10);
    for (const auto& [subset, c] : counts) CHECK(std::abs(c / double(draws) - 0.1) < 0.01);
}

TEST_CASE("select_candidate_subsets: deterministic and validated") {
    Rng a(99), b(99);
    CHECK(select_candidate_subsets(10, 3, 7, a) == select_candidate_subsets(10, 3, 7, b));
    Rng rng(1);
    CHECK_THROWS_AS(select_candidate_subsets(3, 4, 1, rng), Error);
    CHECK_THROWS_AS(select_candidate_subsets(3, 0, 1, rng), Error);
    CHECK_THROWS_AS(select_candidate_subsets(3, 2, 0, rng), Error);
}

TEST_CASE("relaxation_alpha: schedule 1 - 2/(k+2)") {
    CHECK(relaxation_alpha(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(relaxation_alpha(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(relaxation_alpha(3) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("bic_value: base, closed form and monotone penalty") {
    CHECK(bic_value(0, 12.5, 50, 3, 8, 0.2) == doctest::Approx(0.25).epsilon(1e-15));
    const double expected = std::log(100.0) * (4.0 + std::pow(8.0, 1.2)) / 100.0;
    CHECK(bic_value(1, 0.0, 100, 4, 8, 0.2) == doctest::Approx(expected).epsilon(1e-14));
    // frozen: evaluated independently in double precision
    CHECK(bic_value(1, 0.0, 100, 4, 8, 0.2) == doctest::Approx(0.7426174268396774).epsilon(1e-14));
    for (int tau = 0; tau < 10; ++tau) CHECK(bic_value(tau + 1, 3.0, 200, 2, 10, 0.2) > bic_value(tau, 3.0, 200, 2, 10, 0.2));
}

TEST_CASE("aga: one step recovers a noiseless single ridge") {
    std::mt19937_64 g(21);
    const int n = 400, p = 3;
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
    const Eigen::VectorXd theta = oracle::random_unit(g, p);
    // a cubic polynomial of the projection lies in the cubic spline space
    const Eigen::VectorXd z = scaled_projection(X, theta);
    const Eigen::VectorXd y = (z.array().cube() - 0.5 * z.array() + 0.3 * z.array().square()).matrix();

    // z^3 - z/2 is nearly uncorrelated with z, so the OLS start is poor and
    // recovery rests on the random starts; use the default count
    FitConfig cfg = small_config(Variant::aga, p, 1, 1);
    cfg.n_starts = FitConfig{}.n_starts;
    Rng rng(4);
    GreedyState state(X, y, cfg);
    greedy_step_aga(state, rng);
    CHECK(state.residuals().norm() < 1e-6 * y.norm());
}

TEST_CASE("aga: two additive signals on disjoint subsets are recovered in two steps") {
    std::mt19937_64 g(8);
    const int n = 600, p = 4;
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
    const Eigen::VectorXd y = ((X.col(0) + X.col(1)).array().sin() + 0.7 * (X.col(2) - X.col(3)).array().square()).matrix();

    Rng rng(2);
    GreedyState state(X, y, small_config(Variant::aga, 2, 40, 2));
    greedy_step_aga(state, rng);
    greedy_step_aga(state, rng);
    const auto& ridges = state.model().ridges;
    REQUIRE(ridges.size() == 2);
    std::vector<std::vector<int>> got{ridges[0].subset, ridges[1].subset};
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<std::vector<int>>{{0, 1}, {2, 3}});
    CHECK(state.sse() < 1e-3 * state.centered_target().squaredNorm());
}

TEST_CASE("aga: damped joint objective never increases and padded start is feasible") {
    for (int seed = 0; seed < 5; ++seed) {
        std::mt19937_64 g(100 + seed);
        const int n = 300, p = 6;
        const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
        const Eigen::VectorXd y = ((X.col(0) + 0.5 * X.col(2)).array().sin() + X.col(4).array() * X.col(5).array()).matrix() +
                                  noise(g, n, 0.2);
        Rng rng(seed);
        GreedyState state(X, y, small_config(Variant::aga, 3, 2, 6));
        double previous = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 6; ++t) {
            state.step(rng);
            const auto& d = state.model().diagnostics.back();
            CHECK(d.objective <= d.padded_objective * (1.0 + 1e-12));
            CHECK(d.objective <= previous * (1.0 + 1e-12));
            previous = d.objective;
        }
    }
}

TEST_CASE("oga: residual norm is non-increasing") {
    for (int seed = 0; seed < 5; ++seed) {
        std::mt19937_64 g(200 + seed);
        const int n = 300, p = 6;
        const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
        const Eigen::VectorXd y = (2.0 * X.col(1)).array().cos().matrix() + X.col(3) + noise(g, n, 0.3);
        Rng rng(seed);
        GreedyState state(X, y, small_config(Variant::oga, 2, 3, 6));
        double previous = state.residuals().norm();
        for (int t = 0; t < 6; ++t) {
            state.step(rng);
            const double r = state.residuals().norm();
            CHECK(r <= previous * (1.0 + 1e-12));
            previous = r;
        }
    }
}

TEST_CASE("oga: one term predicts like aga") {
    std::mt19937_64 g(31);
    const int n = 300, p = 4;
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
    const Eigen::VectorXd y = (1.5 * (X.col(0) - X.col(2))).array().tanh().matrix() + noise(g, n, 0.1);
    Rng ra(6), ro(6);
    GreedyState a(X, y, small_config(Variant::aga, 2, 3, 1));
    GreedyState o(X, y, small_config(Variant::oga, 2, 3, 1));
    a.step(ra);
    o.step(ro);
    const Eigen::MatrixXd Xt = oracle::uniform_matrix(g, 100, p);
    CHECK((a.model().predict(Xt) - o.model().predict(Xt)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((a.fitted() - o.fitted()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("refit_term_scales: previous scales survive only an orthogonal addition") {
    std::mt19937_64 g(41);
    const int n = 80;
    const Eigen::MatrixXd G = oracle::uniform_matrix(g, n, 3);
    const Eigen::VectorXd y = oracle::uniform_matrix(g, n, 1).col(0) + G * Eigen::Vector3d(1.0, -2.0, 0.5);
    std::vector<Eigen::VectorXd> cols{G.col(0), G.col(1)};
    const Eigen::VectorXd before = refit_term_scales(cols, y);
    CHECK((before - oracle::qr_ls(G.leftCols(2), y)).cwiseAbs().maxCoeff() < 1e-10);

    // component of the third column orthogonal to the first two
    const Eigen::MatrixXd A = G.leftCols(2);
    const Eigen::VectorXd orth = G.col(2) - A * oracle::qr_ls(A, G.col(2));
    auto with_orth = cols;
    with_orth.push_back(orth);
    const Eigen::VectorXd after = refit_term_scales(with_orth, y);
    CHECK((after.head(2) - before).cwiseAbs().maxCoeff() < 1e-10);

    auto with_raw = cols;
    with_raw.push_back(G.col(2));
    const Eigen::VectorXd changed = refit_term_scales(with_raw, y);
    CHECK((changed.head(2) - before).cwiseAbs().maxCoeff() > 1e-3);

    // a zero column keeps a zero scale
    auto with_zero = cols;
    with_zero.push_back(Eigen::VectorXd::Zero(n));
    const Eigen::VectorXd z = refit_term_scales(with_zero, y);
    CHECK(z[2] == 0.0);
    CHECK((z.head(2) - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rga: first step equals the fitted ridge; weights unroll the recursion") {
    std::mt19937_64 g(51);
    const int n = 300, p = 5;
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
    const Eigen::VectorXd y = (X.col(0) + X.col(1)).array().sin().matrix() + 0.5 * X.col(3).array().square().matrix() +
                              noise(g, n, 0.1);
    Rng rng(9);
    GreedyState state(X, y, small_config(Variant::rga, 2, 2, 5));
    state.step(rng);
    REQUIRE(state.model().weights == std::vector<double>{1.0});
    CHECK((state.fitted() - eval_ridge_rows(state.model().ridges[0], X)).cwiseAbs().maxCoeff() < 1e-14);
    for (int t = 1; t < 5; ++t) state.step(rng);

    const PprModel& m = state.model();
    REQUIRE(m.k() == 5);
    for (int tau = 1; tau <= 5; ++tau) {
        double w = 1.0;
        for (int j = tau + 1; j <= 5; ++j) w *= 1.0 - 2.0 / (j + 2.0);
        CHECK(m.weights[static_cast<std::size_t>(tau - 1)] == doctest::Approx(w).epsilon(1e-14));
    }
    const Eigen::MatrixXd Xt = oracle::uniform_matrix(g, 100, p);
    for (int i = 0; i < Xt.rows(); ++i) {
        const Eigen::VectorXd x = Xt.row(i).transpose();
        double rec = 0.0;
        for (int k = 1; k <= 5; ++k) rec = relaxation_alpha(k) * rec + eval_ridge(m.ridges[static_cast<std::size_t>(k - 1)], x);
        CHECK(std::abs(m.predict_row(x) - (m.intercept + rec)) < 1e-10);
    }
}

TEST_CASE("PprModel: prediction decomposes and BIC trace recomputes for all variants") {
    for (Variant v : {Variant::aga, Variant::oga, Variant::rga}) {
        std::mt19937_64 g(61);
        const int n = 250, p = 5;
        const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
        const Eigen::VectorXd y = (X.col(0) - X.col(4)).array().exp().matrix() + noise(g, n, 0.2);
        Rng rng(17);
        const FitConfig cfg = small_config(v, 3, 2, 4);
        const PprModel m = run_greedy(X, y, cfg, rng);
        REQUIRE(m.k() == 4);
        CHECK(m.intercept == doctest::Approx(y.mean()).epsilon(1e-14));

        const Eigen::MatrixXd Xt = oracle::uniform_matrix(g, 100, p);
        const Eigen::VectorXd batch = m.predict(Xt);
        for (int i = 0; i < 100; ++i) {
            const Eigen::VectorXd x = Xt.row(i).transpose();
            double s = m.intercept;
            for (int t = 0; t < m.k(); ++t) s += m.weights[static_cast<std::size_t>(t)] * eval_ridge(m.ridges[static_cast<std::size_t>(t)], x);
            CHECK(std::abs(m.predict_row(x) - s) < 1e-10);
            CHECK(std::abs(batch[i] - s) < 1e-10);
        }

        REQUIRE(m.bic_trace.size() >= static_cast<std::size_t>(m.k()));
        for (std::size_t i = 0; i < m.bic_trace.size(); ++i) {
            const auto& b = m.bic_trace[i];
            CHECK(b.tau == static_cast<int>(i) + 1);
            CHECK(b.bic == bic_value(b.tau, b.sse, n, cfg.q, cfg.J, cfg.nu));
        }
        // the stored SSE of the last step matches the residual of the model itself
        const double sse = (y - m.predict(X)).squaredNorm();
        CHECK(m.bic_trace.back().sse == doctest::Approx(sse).epsilon(1e-9));
    }
}

TEST_CASE("run_greedy: fixed_k gives exactly k_max ridges") {
    std::mt19937_64 g(71);
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, 200, 4);
    const Eigen::VectorXd y = noise(g, 200, 1.0);
    for (Variant v : {Variant::aga, Variant::oga, Variant::rga}) {
        Rng rng(1);
        CHECK(run_greedy(X, y, small_config(v, 2, 2, 3), rng).k() == 3);
    }
}

TEST_CASE("run_greedy: BIC stops at one ridge on pure noise") {
    int ones = 0;
    for (int seed = 0; seed < 10; ++seed) {
        std::mt19937_64 g(1000 + seed);
        const Eigen::MatrixXd X = oracle::uniform_matrix(g, 300, 10);
        const Eigen::VectorXd y = noise(g, 300, 1.0);
        Rng rng(static_cast<std::uint64_t>(seed));
        const PprModel m = run_greedy(X, y, small_config(Variant::aga, 4, 3, 20, Stopping::bic), rng);
        CHECK(m.k() >= 1);
        CHECK(m.bic_trace.size() == static_cast<std::size_t>(m.k()) + 1);
        ones += m.k() == 1;
    }
    CHECK(ones >= 9);
}

TEST_CASE("run_greedy: BIC keeps one or two ridges for a single-index signal") {
    int hits = 0;
    for (int seed = 0; seed < 5; ++seed) {
        std::mt19937_64 g(2000 + seed);
        const int p = 5;
        const Eigen::MatrixXd X = oracle::uniform_matrix(g, 400, p);
        const Eigen::VectorXd theta = oracle::random_unit(g, p);
        const Eigen::VectorXd y = (2.0 * X * theta).array().sin().matrix() + noise(g, 400, 0.1);
        const Eigen::MatrixXd Xt = oracle::uniform_matrix(g, 400, p);
        const Eigen::VectorXd yt = (2.0 * Xt * theta).array().sin().matrix() + noise(g, 400, 0.1);
        Rng rng(static_cast<std::uint64_t>(seed));
        const PprModel m = run_greedy(X, y, small_config(Variant::aga, p, 1, 20, Stopping::bic), rng);
        hits += (m.k() == 1 || m.k() == 2) && rpe(m.predict(Xt), yt) < 0.1;
    }
    CHECK(hits == 5);
}

TEST_CASE("run_greedy: rejects configurations that do not fit the data") {
    std::mt19937_64 g(3);
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, 10, 3);
    const Eigen::VectorXd y = noise(g, 10, 1.0);
    Rng rng(1);
    CHECK_THROWS_AS(run_greedy(X, y, small_config(Variant::aga, 4, 1, 2), rng), Error);
    CHECK_THROWS_AS(run_greedy(X, y, small_config(Variant::aga, 2, 1, 2), rng), Error);  // n <= J + q
    CHECK_THROWS_AS(run_greedy(X, Eigen::VectorXd::Zero(9), small_config(Variant::aga, 1, 1, 1), rng), Error);
}

TEST_CASE("fit_ppr_full: one term is a single-index fit on the centered response") {
    std::mt19937_64 g(81);
    const int n = 300, p = 4;
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
    const Eigen::VectorXd y = (X.col(0) + 2.0 * X.col(1)).array().sin().matrix() + noise(g, n, 0.1);
    const FitConfig cfg = small_config(Variant::aga, 1, 1, 1);

    Rng r1(5);
    const PprModel m = fit_ppr_full(X, y, 1, cfg, r1);
    REQUIRE(m.k() == 1);

    Rng r2(5);
    (void)select_candidate_subsets(p, p, 1, r2);  // the step draws its (trivial) subset first
    SingleIndexOptions opts;
    opts.n_starts = cfg.n_starts;
    opts.rng = &r2;
    const Eigen::VectorXd yc = y.array() - y.mean();
    const auto kv = std::make_shared<const KnotVector>(cfg.J, cfg.degree);
    const SingleIndexFit fit = fit_single_index(X, yc, kv, opts);
    CHECK((m.ridges[0].theta - fit.ridge.theta).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.predict(X) - (y.mean() + eval_ridge_rows(fit.ridge, X).array()).matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_ppr_full: refinement never loses to plain aga on a two-ridge target") {
    for (int seed = 0; seed < 3; ++seed) {
        std::mt19937_64 g(90 + seed);
        const int n = 500, p = 4;
        const Eigen::MatrixXd X = oracle::uniform_matrix(g, n, p);
        const Eigen::VectorXd y = (X.col(0) + X.col(1)).array().sin().matrix() +
                                  (X.col(2) - X.col(3) + X.col(0)).array().square().matrix() + noise(g, n, 0.1);
        FitConfig cfg = small_config(Variant::aga, p, 1, 2);
        Rng ra(static_cast<std::uint64_t>(seed)), rf(static_cast<std::uint64_t>(seed));
        const PprModel plain = run_greedy(X, y, cfg, ra);
        const PprModel full = fit_ppr_full(X, y, 2, cfg, rf);
        REQUIRE(full.k() == 2);
        const double sse_plain = (y - plain.predict(X)).squaredNorm();
        const double sse_full = (y - full.predict(X)).squaredNorm();
        CHECK(sse_full <= sse_plain * (1.0 + 1e-12));
        CHECK(full.weights == std::vector<double>{1.0, 1.0});
    }
    std::mt19937_64 g(1);
    const Eigen::MatrixXd X = oracle::uniform_matrix(g, 20, 4);
    Rng rng(1);
    CHECK_THROWS_AS(fit_ppr_full(X, Eigen::VectorXd::Zero(20), 2, small_config(Variant::aga, 1, 1, 1), rng), Error);
}
