#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "eppr/benchmark.hpp"
#include "eppr/cli.hpp"
#include "eppr/ensemble.hpp"
#include "eppr/error.hpp"
#include "eppr/metrics.hpp"
#include "eppr/synth.hpp"
#include "oracles.hpp"

using namespace eppr;

namespace {

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "eppr");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (out_text) *out_text = out.str();
    return code;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

Dataset synth_dataset(Scenario s, int n, int p, double noise, std::uint64_t seed) {
    SynthData d = generate(s, n, p, noise, seed);
    Dataset out;
    out.X = std::move(d.X);
    out.y = std::move(d.y);
    for (int j = 0; j < p; ++j) out.column_names.push_back("x" + std::to_string(j + 1));
    out.column_names.emplace_back("y");
    return out;
}

}  // namespace

TEST_CASE("metric_rpe: naive, perfect and hand-computed predictors") {
    const Eigen::Vector3d y(1.0, 4.0, -2.0);
    CHECK(metric_rpe(Eigen::Vector3d::Constant(0.5), y, 0.5) == 1.0);
    CHECK(metric_rpe(y, y, 0.5) == 0.0);
    CHECK(metric_rpe(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 4.0), 2.0) == doctest::Approx(0.8).epsilon(1e-15));
    try {
        metric_rpe(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(3.0, 3.0), 3.0);
        FAIL("expected undefined metric");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::undefined_metric);
    }
}

TEST_CASE("metric_mr: strict threshold and hand counts") {
    CHECK(metric_mr(Eigen::Vector3d(0.9, 0.1, 0.51), Eigen::Vector3d(1, 0, 1)) == 0.0);
    CHECK(metric_mr(Eigen::Vector3d(0.1, 0.9, 0.5), Eigen::Vector3d(1, 0, 1)) == 1.0);
    CHECK(metric_mr(Eigen::Vector3d(0.6, 0.4, 0.7), Eigen::Vector3d(1, 1, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("synth: scenarios are reproducible and documented") {
    const SynthData a = generate(Scenario::single_index, 100, 4, 0.0, 3);
    const SynthData b = generate(Scenario::single_index, 100, 4, 0.0, 3);
    CHECK(a.X == b.X);
    CHECK(a.y == b.y);
    CHECK(a.description == b.description);
    CHECK(a.X.cwiseAbs().maxCoeff() <= 1.0);

    // noiseless single index: y is a function of one projection, sin(2 theta^T x)
    const auto pos = a.description.find("theta: ");
    REQUIRE(pos != std::string::npos);
    std::istringstream in(a.description.substr(pos + 8));  // past "theta: ("
    Eigen::VectorXd theta(4);
    for (int j = 0; j < 4; ++j) {
        in >> theta[j];
        if (in.peek() == ',') in.get();
    }
    CHECK(std::abs(theta.norm() - 1.0) < 1e-12);
    CHECK(((2.0 * a.X * theta).array().sin().matrix() - a.y).cwiseAbs().maxCoeff() < 1e-9);

    const SynthData noise = generate(Scenario::noise, 2000, 3, 1.0, 2);
    const Eigen::VectorXd yc = noise.y.array() - noise.y.mean();
    for (int j = 0; j < 3; ++j) {
        const Eigen::VectorXd xc = noise.X.col(j).array() - noise.X.col(j).mean();
        CHECK(std::abs(xc.dot(yc) / (xc.norm() * yc.norm())) < 0.1);
    }

    const SynthData ppr = generate(Scenario::ppr3, 50, 9, 0.5, 1);
    for (const char* key : {"theta1:", "theta2:", "theta3:", "g1:", "g2:", "g3:"}) CHECK(ppr.description.find(key) != std::string::npos);

    const SynthData cls = generate(Scenario::two_gaussian, 4000, 3, 0.0, 5);
    int ones = 0, bayes_errors = 0;
    for (Eigen::Index i = 0; i < cls.y.size(); ++i) {
        CHECK((cls.y[i] == 0.0 || cls.y[i] == 1.0));
        ones += cls.y[i] == 1.0;
        bayes_errors += (cls.X(i, 0) > 0.0) != (cls.y[i] == 1.0);
    }
    CHECK(std::abs(ones / 4000.0 - 0.5) < 0.05);
    CHECK(std::abs(bayes_errors / 4000.0 - 0.10) < 0.02);

    CHECK_THROWS_AS(generate(Scenario::ppr3, 50, 5, 0.5, 1), Error);
    CHECK_THROWS_AS(parse_scenario("spiral"), Error);
}

TEST_CASE("benchmark: mean matches per-repeat values and runs are deterministic") {
    const Dataset d = synth_dataset(Scenario::additive3, 240, 6, 0.3, 3);
    BenchmarkOptions opts;
    opts.repeats = 3;
    opts.seed = 11;
    opts.baseline = true;
    opts.overrides.B = 4;
    opts.overrides.threads = 2;
    const BenchmarkReport r1 = run_benchmark(d, opts);
    const BenchmarkReport r2 = run_benchmark(d, opts);
    CHECK(render_report(r1) == render_report(r2));
    REQUIRE(r1.results.size() == 3);
    double s = 0.0;
    for (const auto& r : r1.results) {
        REQUIRE(r.metric.has_value());
        CHECK(r.n_train == 160);
        CHECK(r.n_test == 80);
        s += *r.metric;
    }
    CHECK(std::abs(r1.mean() - s / 3.0) < 1e-12);
    REQUIRE(r1.baseline_mean().has_value());

    const std::string text = render_report(r1);
    CHECK(text.find("[results]") != std::string::npos);
    CHECK(text.find("eppr.mean=") != std::string::npos);
    CHECK(text.find("seconds") == std::string::npos);
    CHECK(render_report(r1, true).find("seconds") != std::string::npos);
}

TEST_CASE("linear baseline reproduces an exact affine response") {
    std::mt19937_64 g(2);
    const Eigen::MatrixXd X = 5.0 * oracle::uniform_matrix(g, 40, 3).array() + 1.0;
    const Eigen::VectorXd y = (X * Eigen::Vector3d(2.0, -1.0, 0.5)).array() + 3.0;
    const LinearBaseline lb = LinearBaseline::fit(X, y);
    CHECK((lb.predict(X) - y).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("cli: synth, train, predict and benchmark") {
    const std::string csv = oracle::tmp_path("cli_synth.csv");
    CHECK(run_cli({"synth", "--scenario", "ppr3", "--n", "150", "--p", "9", "--seed", "4", "--out", csv}) == cli::ok);
    const auto rows = lines(slurp(csv));
    REQUIRE(rows.size() == 151);
    CHECK(rows[0] == "x1,x2,x3,x4,x5,x6,x7,x8,x9,y");
    CHECK(slurp(csv + ".txt").find("theta3:") != std::string::npos);

    const std::string csv2 = oracle::tmp_path("cli_synth2.csv");
    CHECK(run_cli({"synth", "--scenario", "ppr3", "--n", "150", "--p", "9", "--seed", "4", "--out", csv2}) == cli::ok);
    CHECK(slurp(csv) == slurp(csv2));

    const std::string model = oracle::tmp_path("cli_model.json");
    CHECK(run_cli({"train", "--data", csv, "--target", "y", "--out", model, "--B", "3", "--kmax", "4", "--seed", "9",
                   "--threads", "2"}) == cli::ok);
    const std::string model2 = oracle::tmp_path("cli_model2.json");
    CHECK(run_cli({"train", "--data", csv, "--target", "9", "--out", model2, "--B", "3", "--kmax", "4", "--seed", "9",
                   "--threads", "1"}) == cli::ok);
    CHECK(slurp(model) == slurp(model2));

    const std::string pred = oracle::tmp_path("cli_pred.csv");
    CHECK(run_cli({"predict", "--model", model, "--data", csv, "--target", "y", "--out", pred}) == cli::ok);
    const auto pl = lines(slurp(pred));
    REQUIRE(pl.size() == 151);
    CHECK(pl[0] == "prediction");
    const EnsembleModel m = load_model(model);
    const Dataset d = load_csv(csv, std::string("y"));
    const Eigen::VectorXd expected = predict(m, d.X);
    for (Eigen::Index i = 0; i < expected.size(); ++i) CHECK(std::stod(pl[static_cast<std::size_t>(i) + 1]) == expected[i]);

    std::string report1, report2;
    CHECK(run_cli({"benchmark", "--data", csv, "--target", "y", "--repeats", "1", "--seed", "3", "--B", "2", "--baseline"},
                  &report1) == cli::ok);
    CHECK(run_cli({"benchmark", "--data", csv, "--target", "y", "--repeats", "1", "--seed", "3", "--B", "2", "--baseline"},
                  &report2) == cli::ok);
    CHECK(report1 == report2);
    CHECK(report1.find("baseline.mean=") != std::string::npos);
}

TEST_CASE("cli: predict marks incomplete rows") {
    const std::string train_csv = oracle::tmp_path("cli_small.csv");
    CHECK(run_cli({"synth", "--scenario", "single_index", "--n", "80", "--p", "3", "--out", train_csv}) == cli::ok);
    const std::string model = oracle::tmp_path("cli_small.json");
    CHECK(run_cli({"train", "--data", train_csv, "--target", "y", "--out", model, "--B", "2", "--J", "6"}) == cli::ok);
    const std::string holes = oracle::tmp_path("cli_holes.csv");
    std::ofstream(holes) << "x1,x2,x3\n0.1,0.2,0.3\n0.1,,0.3\n-0.5,0.5,0\n";
    const std::string pred = oracle::tmp_path("cli_holes_pred.csv");
    CHECK(run_cli({"predict", "--model", model, "--data", holes, "--out", pred}) == cli::ok);
    const auto pl = lines(slurp(pred));
    REQUIRE(pl.size() == 4);
    CHECK(pl[2] == "nan");
    CHECK(pl[1] != "nan");
    CHECK(pl[3] != "nan");
}

TEST_CASE("cli: exit codes") {
    CHECK(run_cli({}) == cli::usage);
    CHECK(run_cli({"frobnicate"}) == cli::usage);
    CHECK(run_cli({"train", "--data", "x.csv"}) == cli::usage);
    CHECK(run_cli({"synth", "--scenario", "spiral", "--out", oracle::tmp_path("s.csv")}) == cli::usage);
    CHECK(run_cli({"train", "--data", oracle::tmp_path("missing.csv"), "--target", "y", "--out", oracle::tmp_path("m.json")}) ==
          cli::io);
    CHECK(run_cli({"synth", "--scenario", "noise", "--out", oracle::tmp_path("no/dir/s.csv")}) == cli::io);

    const std::string csv = oracle::tmp_path("cli_codes.csv");
    CHECK(run_cli({"synth", "--scenario", "noise", "--n", "60", "--p", "2", "--out", csv}) == cli::ok);
    CHECK(run_cli({"train", "--data", csv, "--target", "nope", "--out", oracle::tmp_path("m.json")}) == cli::data);
    CHECK(run_cli({"train", "--data", csv, "--target", "y", "--out", oracle::tmp_path("m.json"), "--variant", "xyz"}) ==
          cli::usage);
    CHECK(run_cli({"train", "--data", csv, "--target", "y", "--out", oracle::tmp_path("m.json"), "--q", "5"}) == cli::usage);

    // constant response: RPE is undefined on every repeat
    const std::string flat = oracle::tmp_path("cli_flat.csv");
    {
        std::ofstream f(flat);
        f << "a,y\n";
        for (int i = 0; i < 60; ++i) f << i << ",1\n";
    }
    CHECK(run_cli({"benchmark", "--data", flat, "--target", "y", "--repeats", "1", "--B", "1"}) == cli::numerical);
}
