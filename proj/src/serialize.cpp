#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eppr/ensemble.hpp"
#include "eppr/error.hpp"

namespace eppr {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "eppr-model";
constexpr int kVersion = 1;

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

// Thread count is an execution detail and stays out of the document, so the
// same fit serializes identically however it was scheduled.
json config_to_json(const FitConfig& c) {
    return json{{"variant", to_string(c.variant)},
                {"q", c.q},
                {"ell", c.ell},
                {"B", c.B},
                {"k_max", c.k_max},
                {"J", c.J},
                {"degree", c.degree},
                {"nu", c.nu},
                {"stopping", to_string(c.stopping)},
                {"truncation", to_string(c.truncation)},
                {"seed", c.seed},
                {"n_starts", c.n_starts}};
}

FitConfig config_from_json(const json& j) {
    FitConfig c;
    c.variant = parse_variant(j.at("variant").get<std::string>());
    c.q = j.at("q").get<int>();
    c.ell = j.at("ell").get<int>();
    c.B = j.at("B").get<int>();
    c.k_max = j.at("k_max").get<int>();
    c.J = j.at("J").get<int>();
    c.degree = j.at("degree").get<int>();
    c.nu = j.at("nu").get<double>();
    c.stopping = parse_stopping(j.at("stopping").get<std::string>());
    c.truncation = parse_truncation(j.at("truncation").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.n_starts = j.at("n_starts").get<int>();
    return c;
}

json member_to_json(const PprModel& m) {
    json ridges = json::array();
    for (const auto& r : m.ridges) {
        ridges.push_back(json{{"subset", r.subset},
                              {"theta", vec_to_json(r.theta)},
                              {"lo", r.scaler.lo},
                              {"hi", r.scaler.hi},
                              {"coeffs", vec_to_json(r.coeffs)}});
    }
    json trace = json::array();
    for (const auto& b : m.bic_trace) trace.push_back(json{{"tau", b.tau}, {"sse", b.sse}, {"bic", b.bic}});
    return json{{"variant", to_string(m.variant)},
                {"intercept", m.intercept},
                {"k", m.k()},
                {"weights", m.weights},
                {"ridges", std::move(ridges)},
                {"bic_trace", std::move(trace)}};
}

PprModel member_from_json(const json& j, const std::shared_ptr<const KnotVector>& knots, int p) {
    PprModel m;
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.intercept = j.at("intercept").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& rj : j.at("ridges")) {
        Ridge r;
        r.subset = rj.at("subset").get<std::vector<int>>();
        r.theta = vec_from_json(rj.at("theta"));
        r.scaler = ProjectionScaler{rj.at("lo").get<double>(), rj.at("hi").get<double>()};
        r.coeffs = vec_from_json(rj.at("coeffs"));
        r.knots = knots;
        if (r.subset.empty() || static_cast<std::size_t>(r.theta.size()) != r.subset.size() ||
            r.coeffs.size() != knots->basis_count() || !(r.scaler.hi > r.scaler.lo)) {
            throw Error(ErrorCode::parse, "malformed ridge in model document");
        }
        for (int idx : r.subset) {
            if (idx < 0 || idx >= p) throw Error(ErrorCode::parse, "ridge subset index out of range");
        }
        m.ridges.push_back(std::move(r));
    }
    if (m.weights.size() != m.ridges.size() || j.at("k").get<int>() != m.k()) {
        throw Error(ErrorCode::parse, "member weight count does not match its ridges");
    }
    for (const auto& bj : j.at("bic_trace")) {
        m.bic_trace.push_back(BicPoint{bj.at("tau").get<int>(), bj.at("sse").get<double>(), bj.at("bic").get<double>()});
    }
    return m;
}

}  // namespace

std::string serialize(const EnsembleModel& model) {
    json members = json::array();
    for (const auto& m : model.members) members.push_back(member_to_json(m));
    json doc{{"format", kFormat},
             {"version", kVersion},
             {"config", config_to_json(model.config)},
             {"seed", model.seed()},
             {"n_features", model.n_features()},
             {"feature_scaling", json{{"lo", model.scaling.lo}, {"hi", model.scaling.hi}}},
             {"knots", json{{"J", model.knots->basis_count()}, {"degree", model.knots->degree()}}},
             {"truncation", model.truncation ? json(*model.truncation) : json(nullptr)},
             {"members", std::move(members)}};
    return doc.dump(1) + "\n";
}

EnsembleModel parse_model(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != kFormat || doc.at("version").get<int>() != kVersion) {
            throw Error(ErrorCode::parse, "not an eppr-model version 1 document");
        }
        EnsembleModel model;
        model.config = config_from_json(doc.at("config"));
        if (doc.at("seed").get<std::uint64_t>() != model.config.seed) {
            throw Error(ErrorCode::parse, "seed disagrees with config");
        }
        model.scaling.lo = doc.at("feature_scaling").at("lo").get<std::vector<double>>();
        model.scaling.hi = doc.at("feature_scaling").at("hi").get<std::vector<double>>();
        const int p = doc.at("n_features").get<int>();
        if (model.scaling.lo.size() != static_cast<std::size_t>(p) || model.scaling.hi.size() != static_cast<std::size_t>(p)) {
            throw Error(ErrorCode::parse, "feature scaling length disagrees with n_features");
        }
        model.knots = std::make_shared<const KnotVector>(doc.at("knots").at("J").get<int>(),
                                                         doc.at("knots").at("degree").get<int>());
        if (!doc.at("truncation").is_null()) model.truncation = doc.at("truncation").get<double>();
        for (const auto& mj : doc.at("members")) model.members.push_back(member_from_json(mj, model.knots, p));
        if (model.members.empty()) throw Error(ErrorCode::parse, "model has no members");
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("malformed model document: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse) throw;
        throw Error(ErrorCode::parse, std::string("invalid model document: ") + e.what());
    }
}

void save_model(const EnsembleModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    out << serialize(model);
    if (!out) throw Error(ErrorCode::io, "failed writing " + path);
}

EnsembleModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::file_not_found, "cannot open model " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace eppr
