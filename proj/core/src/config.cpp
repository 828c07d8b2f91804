#include "torusns/config.hpp"

#include <fstream>
#include <set>

namespace torusns {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(section + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(section + ": unknown key '" + key + "'");
}

double require_positive(const json& obj, const std::string& section, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(section + "." + key + ": missing");
    const double v = obj.at(key).get<double>();
    if (!(v > 0.0)) throw ConfigError(section + "." + key + ": must be > 0");
    return v;
}

int require_positive_int(const json& obj, const std::string& section, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(section + "." + key + ": missing");
    const auto v = obj.at(key).get<std::int64_t>();
    if (v < 1) throw ConfigError(section + "." + key + ": must be >= 1");
    return static_cast<int>(v);
}

}  // namespace

ConfigDocument ConfigDocument::from_json(const nlohmann::json& j) {
    reject_unknown(j, "config", {"truncation", "noise", "solver", "experiment", "seed"});
    ConfigDocument doc;
    ExperimentPlan& plan = doc.plan;

    if (!j.contains("truncation")) throw ConfigError("truncation: missing section");
    const json& tr = j.at("truncation");
    reject_unknown(tr, "truncation", {"n_max", "grid_size"});
    plan.trunc.n_max = require_positive_int(tr, "truncation", "n_max");
    plan.trunc.grid_size = tr.contains("grid_size")
                               ? static_cast<int>(tr.at("grid_size").get<std::int64_t>())
                               : TruncationParams::default_grid_size(plan.trunc.n_max);
    if (plan.trunc.grid_size < 3 * plan.trunc.n_max)
        throw ConfigError("truncation.grid_size: must be >= 3*n_max");

    if (!j.contains("noise")) throw ConfigError("noise: missing section");
    const json& no = j.at("noise");
    reject_unknown(no, "noise", {"beta", "delta_law"});
    plan.beta = require_positive(no, "noise", "beta");
    if (!no.contains("delta_law")) throw ConfigError("noise.delta_law: missing");
    const json& dl = no.at("delta_law");
    reject_unknown(dl, "noise.delta_law", {"kind", "theta", "c"});
    const std::string kind = dl.contains("kind") ? dl.at("kind").get<std::string>() : "power";
    if (kind != "power")
        throw ConfigError("noise.delta_law.kind: only 'power' is supported, got '" + kind + "'");
    plan.schedule.theta = require_positive(dl, "noise.delta_law", "theta");
    plan.schedule.c = require_positive(dl, "noise.delta_law", "c");

    if (!j.contains("solver")) throw ConfigError("solver: missing section");
    const json& so = j.at("solver");
    reject_unknown(so, "solver", {"dt", "t_final", "scheme", "record_stride"});
    plan.solver.dt = require_positive(so, "solver", "dt");
    plan.solver.t_final = require_positive(so, "solver", "t_final");
    const std::string scheme =
        so.contains("scheme") ? so.at("scheme").get<std::string>() : "exponential-euler";
    try {
        plan.solver.scheme = scheme_from_string(scheme);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("solver.scheme: ") + e.what());
    }
    plan.solver.record_stride =
        so.contains("record_stride") ? require_positive_int(so, "solver", "record_stride") : 1;

    if (!j.contains("experiment")) throw ConfigError("experiment: missing section");
    const json& ex = j.at("experiment");
    reject_unknown(ex, "experiment",
                   {"kind", "epsilon_list", "trajectories", "burn_in", "radii", "targets",
                    "tolerance"});
    if (!ex.contains("kind")) throw ConfigError("experiment.kind: missing");
    plan.kind = ex.at("kind").get<std::string>();
    static const std::set<std::string> kinds = {"check",  "simulate",       "invariant",
                                                "tails",  "action",         "quasipotential",
                                                "ldp",    "oracle",         "energy"};
    if (!kinds.count(plan.kind))
        throw ConfigError("experiment.kind: unknown kind '" + plan.kind + "'");
    if (!ex.contains("epsilon_list") || !ex.at("epsilon_list").is_array() ||
        ex.at("epsilon_list").empty())
        throw ConfigError("experiment.epsilon_list: must be a non-empty array");
    plan.epsilon_list = ex.at("epsilon_list").get<std::vector<double>>();
    for (double e : plan.epsilon_list)
        if (!(e > 0.0)) throw ConfigError("experiment.epsilon_list: entries must be > 0");
    for (std::size_t i = 1; i < plan.epsilon_list.size(); ++i)
        if (plan.epsilon_list[i] >= plan.epsilon_list[i - 1])
            throw ConfigError("experiment.epsilon_list: must be strictly decreasing");
    plan.trajectories = require_positive_int(ex, "experiment", "trajectories");
    if (ex.contains("burn_in")) {
        plan.burn_in = ex.at("burn_in").get<double>();
        if (plan.burn_in < 0.0) throw ConfigError("experiment.burn_in: must be >= 0");
    } else {
        plan.burn_in = 0.0;
    }
    if (ex.contains("radii")) {
        plan.radii = ex.at("radii").get<std::vector<double>>();
        for (double r : plan.radii)
            if (!(r > 0.0)) throw ConfigError("experiment.radii: entries must be > 0");
    }
    if (ex.contains("targets")) {
        if (!ex.at("targets").is_array()) throw ConfigError("experiment.targets: expected array");
        for (const json& t : ex.at("targets")) {
            reject_unknown(t, "experiment.targets[]", {"k", "a"});
            if (!t.contains("k") || !t.at("k").is_array() || t.at("k").size() != 2)
                throw ConfigError("experiment.targets[].k: expected [k1, k2]");
            if (!t.contains("a") || !t.at("a").is_array() || t.at("a").size() != 2)
                throw ConfigError("experiment.targets[].a: expected [re, im]");
            TargetMode m;
            m.k1 = t.at("k")[0].get<int>();
            m.k2 = t.at("k")[1].get<int>();
            m.re = t.at("a")[0].get<double>();
            m.im = t.at("a")[1].get<double>();
            if (m.k1 == 0 && m.k2 == 0)
                throw ConfigError("experiment.targets[].k: zero wavevector not allowed");
            plan.targets.push_back(m);
        }
    }
    plan.tolerance = ex.contains("tolerance") ? ex.at("tolerance").get<double>() : 0.05;
    if (!(plan.tolerance > 0.0)) throw ConfigError("experiment.tolerance: must be > 0");

    if (!j.contains("seed")) throw ConfigError("seed: missing");
    plan.seed = j.at("seed").get<std::uint64_t>();

    try {
        plan.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json ConfigDocument::to_json() const {
    nlohmann::json j;
    j["truncation"] = {{"n_max", plan.trunc.n_max}, {"grid_size", plan.trunc.grid_size}};
    j["noise"] = {{"beta", plan.beta},
                  {"delta_law",
                   {{"kind", "power"}, {"theta", plan.schedule.theta}, {"c", plan.schedule.c}}}};
    j["solver"] = {{"dt", plan.solver.dt},
                   {"t_final", plan.solver.t_final},
                   {"scheme", to_string(plan.solver.scheme)},
                   {"record_stride", plan.solver.record_stride}};
    nlohmann::json targets = nlohmann::json::array();
    for (const TargetMode& m : plan.targets)
        targets.push_back({{"k", {m.k1, m.k2}}, {"a", {m.re, m.im}}});
    j["experiment"] = {{"kind", plan.kind},
                       {"epsilon_list", plan.epsilon_list},
                       {"trajectories", plan.trajectories},
                       {"burn_in", plan.burn_in},
                       {"radii", plan.radii},
                       {"targets", targets},
                       {"tolerance", plan.tolerance}};
    j["seed"] = plan.seed;
    return j;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string ConfigDocument::hash() const {
    // nlohmann::json keeps object keys sorted, and dump() emits shortest
    // round-trip doubles, so this serialization is canonical across platforms.
    return fnv1a_hex(to_json().dump());
}

}  // namespace torusns
