#include "eppr/benchmark.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "eppr/ensemble.hpp"
#include "eppr/error.hpp"
#include "eppr/metrics.hpp"
#include "eppr/numerics.hpp"

namespace eppr {

namespace {

struct Summary {
    double mean = std::nan("");
    double sd = std::nan("");
};

Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return s;
}

std::vector<double> collect(const std::vector<RepeatResult>& results, bool baseline) {
    std::vector<double> v;
    for (const auto& r : results) {
        const auto& m = baseline ? r.baseline_metric : r.metric;
        if (m) v.push_back(*m);
    }
    return v;
}

double evaluate(Task task, const Eigen::VectorXd& pred, const Eigen::VectorXd& y_test, double train_mean) {
    return task == Task::regression ? metric_rpe(pred, y_test, train_mean) : metric_mr(pred, y_test);
}

std::string exact(double v) { return fmt::format("{}", v); }

}  // namespace

Task parse_task(std::string_view s) {
    if (s == "regression") return Task::regression;
    if (s == "classification") return Task::classification;
    throw Error(ErrorCode::invalid_configuration, "unknown task '" + std::string(s) + "'");
}

std::string_view to_string(Task t) noexcept { return t == Task::regression ? "regression" : "classification"; }

void ConfigOverrides::apply(FitConfig& c) const {
    if (variant) c.variant = *variant;
    if (q) c.q = *q;
    if (ell) c.ell = *ell;
    if (B) c.B = *B;
    if (k_max) c.k_max = *k_max;
    if (J) c.J = *J;
    if (degree) c.degree = *degree;
    if (nu) c.nu = *nu;
    if (stopping) c.stopping = *stopping;
    if (truncation) c.truncation = *truncation;
    if (threads) c.threads = *threads;
}

LinearBaseline LinearBaseline::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    LinearBaseline lb;
    lb.scaling = fit_scaling(X);
    Eigen::MatrixXd design(X.rows(), X.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(X.cols()) = apply_scaling(lb.scaling, X);
    lb.coefficients = solve_ridge_ls(design, y, 0.0).coefficients;
    return lb;
}

Eigen::VectorXd LinearBaseline::predict(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd scaled = apply_scaling(scaling, X);
    return (scaled * coefficients.tail(coefficients.size() - 1)).array() + coefficients[0];
}

double BenchmarkReport::mean() const { return summarize(collect(results, false)).mean; }
double BenchmarkReport::stddev() const { return summarize(collect(results, false)).sd; }

std::optional<double> BenchmarkReport::baseline_mean() const {
    if (!baseline) return std::nullopt;
    return summarize(collect(results, true)).mean;
}

std::optional<double> BenchmarkReport::baseline_stddev() const {
    if (!baseline) return std::nullopt;
    return summarize(collect(results, true)).sd;
}

BenchmarkReport run_benchmark(const Dataset& data, const BenchmarkOptions& options) {
    if (options.repeats < 1) throw Error(ErrorCode::invalid_configuration, "repeats must be >= 1");
    BenchmarkReport report;
    report.task = options.task;
    report.seed = options.seed;
    report.repeats = options.repeats;
    report.baseline = options.baseline;

    for (int r = 0; r < options.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        RepeatResult res;
        res.index = r;
        Rng split_rng = make_stream(options.seed, 2 * static_cast<std::uint64_t>(r));
        const auto [train, test] = partition(data, split_rng);
        res.n_train = static_cast<std::size_t>(train.n());
        res.n_test = static_cast<std::size_t>(test.n());

        FitConfig config = default_config(static_cast<int>(train.n()), static_cast<int>(train.p()));
        options.overrides.apply(config);
        config.seed = stream_seed(options.seed, 2 * static_cast<std::uint64_t>(r) + 1);
        if (r == 0) report.config = config;

        const double train_mean = train.y.mean();
        try {
            const EnsembleModel model = fit(train, config);
            res.metric = evaluate(options.task, predict(model, test.X), test.y, train_mean);
        } catch (const Error& e) {
            res.error = e.what();
        }
        if (options.baseline) {
            try {
                const LinearBaseline lb = LinearBaseline::fit(train.X, train.y);
                res.baseline_metric = evaluate(options.task, lb.predict(test.X), test.y, train_mean);
            } catch (const Error& e) {
                if (!res.error.empty()) res.error += "; ";
                res.error += std::string("baseline: ") + e.what();
            }
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.results.push_back(std::move(res));
    }
    return report;
}

std::string render_report(const BenchmarkReport& report, bool include_timings) {
    const char* metric = report.task == Task::regression ? "RPE" : "MR";
    const FitConfig& c = report.config;
    std::string out;
    out += fmt::format("ePPR benchmark: task={} metric={} repeats={} seed={}\n", to_string(report.task), metric,
                       report.repeats, report.seed);
    out += fmt::format("config: variant={} q={} ell={} B={} k_max={} J={} degree={} nu={} stopping={} truncation={}\n\n",
                       to_string(c.variant), c.q, c.ell, c.B, c.k_max, c.J, c.degree, c.nu, to_string(c.stopping),
                       to_string(c.truncation));

    out += fmt::format("{:>6}  {:>7}  {:>7}  {:>10}", "repeat", "n_train", "n_test", "ePPR");
    if (report.baseline) out += fmt::format("  {:>10}", "linear");
    if (include_timings) out += fmt::format("  {:>9}", "seconds");
    out += '\n';
    auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:>10.4f}", *v) : fmt::format("{:>10}", "error"); };
    for (const auto& r : report.results) {
        out += fmt::format("{:>6}  {:>7}  {:>7}  {}", r.index, r.n_train, r.n_test, cell(r.metric));
        if (report.baseline) out += "  " + cell(r.baseline_metric);
        if (include_timings) out += fmt::format("  {:>9.2f}", r.seconds);
        out += '\n';
    }
    out += fmt::format("{:>6}  {:>7}  {:>7}  {:>10.4f}", "mean", "", "", report.mean());
    if (report.baseline) out += fmt::format("  {:>10.4f}", *report.baseline_mean());
    out += '\n';
    out += fmt::format("{:>6}  {:>7}  {:>7}  {:>10.4f}", "sd", "", "", report.stddev());
    if (report.baseline) out += fmt::format("  {:>10.4f}", *report.baseline_stddev());
    out += "\n";
    for (const auto& r : report.results) {
        if (!r.error.empty()) out += fmt::format("repeat {} error: {}\n", r.index, r.error);
    }

    out += "\n[results]\n";
    out += fmt::format("task={}\nmetric={}\nrepeats={}\nseed={}\n", to_string(report.task), metric == std::string("RPE") ? "rpe" : "mr",
                       report.repeats, report.seed);
    out += fmt::format("eppr.mean={}\neppr.sd={}\n", exact(report.mean()), exact(report.stddev()));
    for (const auto& r : report.results) {
        out += fmt::format("eppr.repeat.{}={}\n", r.index, r.metric ? exact(*r.metric) : std::string("nan"));
    }
    if (report.baseline) {
        out += fmt::format("baseline.mean={}\nbaseline.sd={}\n", exact(*report.baseline_mean()),
                           exact(*report.baseline_stddev()));
        for (const auto& r : report.results) {
            out += fmt::format("baseline.repeat.{}={}\n", r.index,
                               r.baseline_metric ? exact(*r.baseline_metric) : std::string("nan"));
        }
    }
    if (include_timings) {
        for (const auto& r : report.results) out += fmt::format("seconds.repeat.{}={}\n", r.index, exact(r.seconds));
    }
    return out;
}

}  // namespace eppr
