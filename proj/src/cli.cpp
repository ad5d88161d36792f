#include "eppr/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "eppr/benchmark.hpp"
#include "eppr/data_io.hpp"
#include "eppr/ensemble.hpp"
#include "eppr/error.hpp"
#include "eppr/synth.hpp"

namespace eppr::cli {

namespace {

struct TrainArgs {
    std::string data;
    std::string target;
    std::string out;
    std::string variant;
    std::string stopping;
    std::string truncate;
    std::optional<int> q, ell, B, k_max, J, degree, threads;
    std::optional<double> nu;
    std::uint64_t seed = 0;
};

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out;
    std::string target;
};

struct BenchmarkArgs {
    std::string data;
    std::string target;
    std::string task = "regression";
    int repeats = 10;
    std::uint64_t seed = 0;
    bool baseline = false;
    bool timings = false;
    std::string out;
    std::optional<int> B, threads;
    std::string variant;
};

struct SynthArgs {
    std::string scenario;
    int n = 1000;
    int p = 10;
    double noise = 0.5;
    std::uint64_t seed = 0;
    std::string out;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_configuration: return usage;
        case ErrorCode::file_not_found:
        case ErrorCode::io: return io;
        case ErrorCode::domain:
        case ErrorCode::unsupported:
        case ErrorCode::undefined_metric: return numerical;
        default: return data;
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io, "cannot write " + path);
    f << text;
    if (!f) throw Error(ErrorCode::io, "failed writing " + path);
}

ConfigOverrides overrides_from(const TrainArgs& a) {
    ConfigOverrides o;
    if (!a.variant.empty()) o.variant = parse_variant(a.variant);
    if (!a.stopping.empty()) o.stopping = parse_stopping(a.stopping);
    if (!a.truncate.empty()) o.truncation = parse_truncation(a.truncate);
    o.q = a.q;
    o.ell = a.ell;
    o.B = a.B;
    o.k_max = a.k_max;
    o.J = a.J;
    o.degree = a.degree;
    o.nu = a.nu;
    o.threads = a.threads;
    return o;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const Dataset data = load_csv(a.data, parse_target(a.target));
    FitConfig config = default_config(static_cast<int>(data.n()), static_cast<int>(data.p()));
    overrides_from(a).apply(config);
    config.seed = a.seed;
    const EnsembleModel model = fit(data, config);
    save_model(model, a.out);

    double mean_k = 0.0;
    for (const auto& m : model.members) mean_k += m.k();
    mean_k /= static_cast<double>(model.members.size());
    out << fmt::format("trained {} members on n={} p={} (dropped {} rows); variant={} q={} ell={} J={} mean k={:.2f}\n",
                       model.members.size(), data.n(), data.p(), data.dropped_rows, to_string(config.variant), config.q,
                       config.ell, config.J, mean_k);
    out << "model written to " << a.out << '\n';
    return ok;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    const EnsembleModel model = load_model(a.model);
    const RawTable table = read_table(a.data);
    std::size_t skip = table.header.size();
    if (!a.target.empty()) {
        const TargetColumn t = parse_target(a.target);
        if (const auto* name = std::get_if<std::string>(&t)) {
            const auto it = std::find(table.header.begin(), table.header.end(), *name);
            if (it == table.header.end()) throw Error(ErrorCode::missing_target, "column '" + *name + "' not in header");
            skip = static_cast<std::size_t>(it - table.header.begin());
        } else {
            skip = std::get<std::size_t>(t);
            if (skip >= table.header.size()) throw Error(ErrorCode::missing_target, "target index out of range");
        }
    }
    const std::size_t p = table.header.size() - (skip < table.header.size() ? 1 : 0);
    if (static_cast<int>(p) != model.n_features()) {
        throw Error(ErrorCode::shape, fmt::format("model expects {} predictors, file has {}", model.n_features(), p));
    }

    // Incomplete rows predict NaN so output lines stay aligned with input rows.
    const std::size_t usable = table.usable_rows();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(usable), static_cast<Eigen::Index>(p));
    Eigen::Index i = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (!table.row_ok[r]) continue;
        Eigen::Index c = 0;
        for (std::size_t j = 0; j < table.header.size(); ++j) {
            if (j != skip) X(i, c++) = table.rows[r][j];
        }
        ++i;
    }
    const Eigen::VectorXd pred = usable > 0 ? predict(model, X) : Eigen::VectorXd();

    std::string text = "prediction\n";
    i = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        text += table.row_ok[r] ? format_double(pred[i++]) : std::string("nan");
        text += '\n';
    }
    write_text(a.out, text);
    out << fmt::format("wrote {} predictions to {} ({} incomplete rows)\n", table.rows.size(), a.out,
                       table.rows.size() - usable);
    return ok;
}

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
    const Dataset data = load_csv(a.data, parse_target(a.target));
    BenchmarkOptions opts;
    opts.task = parse_task(a.task);
    opts.repeats = a.repeats;
    opts.seed = a.seed;
    opts.baseline = a.baseline;
    opts.overrides.B = a.B;
    opts.overrides.threads = a.threads;
    if (!a.variant.empty()) opts.overrides.variant = parse_variant(a.variant);
    const BenchmarkReport report = run_benchmark(data, opts);
    const std::string text = render_report(report, a.timings);
    if (!a.out.empty()) write_text(a.out, text);
    out << text;
    for (const auto& r : report.results) {
        if (!r.error.empty()) return numerical;
    }
    return ok;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    const Scenario scenario = parse_scenario(a.scenario);
    const SynthData d = generate(scenario, a.n, a.p, a.noise, a.seed);
    std::vector<std::string> header;
    for (int j = 0; j < a.p; ++j) header.push_back("x" + std::to_string(j + 1));
    header.emplace_back("y");
    write_csv(a.out, d.X, d.y, header);
    write_text(a.out + ".txt", d.description);
    out << fmt::format("wrote {} rows to {} (generator notes in {}.txt)\n", a.n, a.out, a.out);
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ensemble projection pursuit regression"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* tr = app.add_subcommand("train", "Fit an ensemble and write the model file");
    tr->add_option("--data", train.data, "Training CSV")->required();
    tr->add_option("--target", train.target, "Response column name or index")->required();
    tr->add_option("--out", train.out, "Model output path")->required();
    tr->add_option("--variant", train.variant, "aga | oga | rga");
    tr->add_option("--q", train.q, "Predictors per candidate subset");
    tr->add_option("--ell", train.ell, "Candidate subsets per step");
    tr->add_option("--B", train.B, "Ensemble size");
    tr->add_option("--kmax", train.k_max, "Maximum ridges per member");
    tr->add_option("--J", train.J, "Spline basis size");
    tr->add_option("--degree", train.degree, "Spline degree");
    tr->add_option("--nu", train.nu, "BIC penalty exponent");
    tr->add_option("--stopping", train.stopping, "bic | fixed_k");
    tr->add_option("--truncate", train.truncate, "off | ln_n");
    tr->add_option("--seed", train.seed, "Master seed");
    tr->add_option("--threads", train.threads, "Worker threads (0 = all cores)");

    PredictArgs pred;
    auto* pr = app.add_subcommand("predict", "Predict with a saved model");
    pr->add_option("--model", pred.model, "Model file")->required();
    pr->add_option("--data", pred.data, "CSV of predictors")->required();
    pr->add_option("--out", pred.out, "Predictions output path")->required();
    pr->add_option("--target", pred.target, "Column to ignore (e.g. the response)");

    BenchmarkArgs bench;
    auto* be = app.add_subcommand("benchmark", "Repeated random-partition evaluation");
    be->add_option("--data", bench.data, "CSV file")->required();
    be->add_option("--target", bench.target, "Response column name or index")->required();
    be->add_option("--task", bench.task, "regression | classification");
    be->add_option("--repeats", bench.repeats, "Number of random partitions");
    be->add_option("--seed", bench.seed, "Master seed");
    be->add_flag("--baseline", bench.baseline, "Also run the linear least-squares baseline");
    be->add_option("--out", bench.out, "Also write the report here");
    be->add_option("--B", bench.B, "Ensemble size override");
    be->add_option("--variant", bench.variant, "aga | oga | rga");
    be->add_option("--threads", bench.threads, "Worker threads (0 = all cores)");
    be->add_flag("--timings", bench.timings, "Include wall-clock seconds per repeat");

    SynthArgs syn;
    auto* sy = app.add_subcommand("synth", "Write a synthetic dataset");
    sy->add_option("--scenario", syn.scenario, "single_index | additive3 | ppr3 | noise | two_gaussian")->required();
    sy->add_option("--n", syn.n, "Rows");
    sy->add_option("--p", syn.p, "Predictors");
    sy->add_option("--noise", syn.noise, "Noise standard deviation");
    sy->add_option("--seed", syn.seed, "Seed");
    sy->add_option("--out", syn.out, "CSV output path")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return usage;
    }

    try {
        if (*tr) return cmd_train(train, out);
        if (*pr) return cmd_predict(pred, out);
        if (*be) return cmd_benchmark(bench, out);
        if (*sy) return cmd_synth(syn, out);
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return numerical;
    }
    return usage;
}

}  // namespace eppr::cli
