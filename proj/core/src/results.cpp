#include "torusns/results.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <set>

namespace torusns {

namespace {

using nlohmann::json;

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

json plan_to_json(const ExperimentPlan& plan) {
    ConfigDocument doc;
    doc.plan = plan;
    json j = doc.to_json();
    j["threads"] = plan.threads;
    return j;
}

ExperimentPlan plan_from_json(const json& j) {
    json config = j;
    int threads = 1;
    if (config.contains("threads")) {
        threads = config.at("threads").get<int>();
        config.erase("threads");
    }
    ExperimentPlan plan = ConfigDocument::from_json(config).plan;
    plan.threads = threads;
    return plan;
}

json record_to_json(const RunRecord& rec) {
    json rows = json::array();
    for (const ObservableRow& r : rec.report.rows) {
        rows.push_back({{"observable", r.observable},
                        {"params", r.params},
                        {"estimate", r.estimate},
                        {"std_error", r.std_error},
                        {"n_samples", r.n_samples}});
    }
    return {{"schema_version", kResultSchemaVersion},
            {"plan", plan_to_json(rec.plan)},
            {"rows", rows},
            {"flags", rec.report.flags},
            {"ok", rec.report.ok},
            {"wall_ms", rec.wall_ms},
            {"code_version", rec.code_version},
            {"config_hash", rec.config_hash}};
}

RunRecord record_from_json(const json& j) {
    RunRecord rec;
    rec.plan = plan_from_json(j.at("plan"));
    for (const json& r : j.at("rows")) {
        ObservableRow row;
        row.observable = r.at("observable").get<std::string>();
        row.params = r.at("params").get<std::map<std::string, double>>();
        row.estimate = r.at("estimate").get<double>();
        row.std_error = r.at("std_error").get<double>();
        row.n_samples = r.at("n_samples").get<std::int64_t>();
        rec.report.rows.push_back(std::move(row));
    }
    rec.report.flags = j.at("flags").get<std::vector<std::string>>();
    rec.report.ok = j.at("ok").get<bool>();
    rec.wall_ms = j.at("wall_ms").get<std::int64_t>();
    rec.code_version = j.at("code_version").get<std::string>();
    rec.config_hash = j.at("config_hash").get<std::string>();
    return rec;
}

void save_record(const RunRecord& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << record_to_json(rec).dump(2) << "\n";
}

RunRecord load_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open record: " + path);
    json j;
    in >> j;
    return record_from_json(j);
}

void append_result_lines(const std::string& path, const RunRecord& rec) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open for appending: " + path);
    for (const ObservableRow& r : rec.report.rows) {
        const json line = {{"schema_version", kResultSchemaVersion},
                           {"config_hash", rec.config_hash},
                           {"observable", r.observable},
                           {"params", r.params},
                           {"estimate", r.estimate},
                           {"std_error", r.std_error},
                           {"n_samples", r.n_samples},
                           {"wall_ms", rec.wall_ms}};
        out << line.dump() << "\n";
    }
}

std::vector<ResultLine> read_result_lines(const std::string& path,
                                          std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results: " + path);
    std::vector<ResultLine> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            // Only a truncated final line is tolerated.
            if (in.peek() == std::char_traits<char>::eof()) {
                if (warnings)
                    warnings->push_back("skipped truncated final line " + std::to_string(lineno) +
                                        " in " + path);
                break;
            }
            throw std::runtime_error("corrupt record at " + path + ":" + std::to_string(lineno));
        }
        ResultLine r;
        r.schema_version = j.at("schema_version").get<int>();
        r.config_hash = j.at("config_hash").get<std::string>();
        r.observable = j.at("observable").get<std::string>();
        r.params = j.at("params").get<std::map<std::string, double>>();
        r.estimate = j.at("estimate").get<double>();
        r.std_error = j.at("std_error").get<double>();
        r.n_samples = j.at("n_samples").get<std::int64_t>();
        r.wall_ms = j.at("wall_ms").get<std::int64_t>();
        out.push_back(std::move(r));
    }
    return out;
}

void merge_result_files(const std::vector<std::string>& inputs, const std::string& output) {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot open for writing: " + output);
    for (const std::string& path : inputs) {
        std::vector<std::string> warnings;
        const auto lines = read_result_lines(path, &warnings);
        for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
        for (const ResultLine& r : lines) {
            const json line = {{"schema_version", r.schema_version},
                               {"config_hash", r.config_hash},
                               {"observable", r.observable},
                               {"params", r.params},
                               {"estimate", r.estimate},
                               {"std_error", r.std_error},
                               {"n_samples", r.n_samples},
                               {"wall_ms", r.wall_ms}};
            out << line.dump() << "\n";
        }
    }
}

void export_plot_data(const std::string& records_path, const std::string& kind,
                      const std::string& out_path) {
    std::vector<std::string> warnings;
    const auto lines = read_result_lines(records_path, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);

    auto param_or_nan = [](const ResultLine& r, const std::string& key) {
        auto it = r.params.find(key);
        return it == r.params.end() ? std::nan("") : it->second;
    };

    if (kind == "tails") {
        out << "epsilon,R,p_hat,err\n";
        bool any = false;
        for (const ResultLine& r : lines) {
            if (r.observable != "tail_prob") continue;
            any = true;
            out << shortest(param_or_nan(r, "epsilon")) << "," << shortest(param_or_nan(r, "R"))
                << "," << shortest(r.estimate) << "," << shortest(r.std_error) << "\n";
        }
        if (!any && !lines.empty()) {
            std::set<std::string> names;
            for (const ResultLine& r : lines) names.insert(r.observable);
            std::string avail;
            for (const std::string& n : names) avail += (avail.empty() ? "" : ", ") + n;
            throw std::runtime_error("no 'tail_prob' rows in " + records_path +
                                     "; available observables: " + avail);
        }
        return;
    }

    // Generic: select rows whose observable matches `kind`.
    out << "epsilon,observable,estimate,error\n";
    bool any = false;
    for (const ResultLine& r : lines) {
        if (r.observable != kind) continue;
        any = true;
        out << shortest(param_or_nan(r, "epsilon")) << "," << r.observable << ","
            << shortest(r.estimate) << "," << shortest(r.std_error) << "\n";
    }
    if (!any && !lines.empty()) {
        std::set<std::string> names;
        for (const ResultLine& r : lines) names.insert(r.observable);
        std::string avail;
        for (const std::string& n : names) avail += (avail.empty() ? "" : ", ") + n;
        throw std::runtime_error("no '" + kind + "' rows in " + records_path +
                                 "; available observables: " + avail);
    }
}

void save_path(const DiscretePath& path, const std::string& file) {
    path.validate();
    const TruncationParams trunc = path.states.front().truncation();
    json states = json::array();
    for (const SpectralField& u : path.states) {
        json flat = json::array();
        for (const Complex& a : u.raw()) {
            flat.push_back(a.real());
            flat.push_back(a.imag());
        }
        states.push_back(std::move(flat));
    }
    const json j = {{"schema_version", kResultSchemaVersion},
                    {"n_max", trunc.n_max},
                    {"grid_size", trunc.grid_size},
                    {"times", path.times},
                    {"states", states}};
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    out << j.dump() << "\n";
}

DiscretePath load_path(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open path file: " + file);
    json j;
    in >> j;
    const TruncationParams trunc{j.at("n_max").get<int>(), j.at("grid_size").get<int>()};
    DiscretePath path;
    path.times = j.at("times").get<std::vector<double>>();
    for (const json& flat : j.at("states")) {
        SpectralField u(trunc);
        auto& raw = u.raw();
        if (flat.size() != 2 * raw.size())
            throw std::runtime_error("path file: state size mismatch");
        for (std::size_t i = 0; i < raw.size(); ++i)
            raw[i] = Complex(flat[2 * i].get<double>(), flat[2 * i + 1].get<double>());
        path.states.push_back(std::move(u));
    }
    path.validate();
    return path;
}

}  // namespace torusns
