#pragma once

#include <nlohmann/json.hpp>

#include "torusns/config.hpp"
#include "torusns/version.hpp"

namespace torusns {

/// One self-describing experiment outcome; persisted one record per line.
struct ResultLine {
    int schema_version = kResultSchemaVersion;
    std::string config_hash;
    std::string observable;
    std::map<std::string, double> params;
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::int64_t wall_ms = 0;
};

/// One experiment outcome bundle: the full plan plus every estimate, enough
/// to rerun bit-exactly.
struct RunRecord {
    ExperimentPlan plan;
    Report report;
    std::int64_t wall_ms = 0;
    std::string code_version = kVersion;
    std::string config_hash;
};

nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const RunRecord& rec);
RunRecord record_from_json(const nlohmann::json& j);

void save_record(const RunRecord& rec, const std::string& path);
RunRecord load_record(const std::string& path);

/// Appends one line per observable row; single writer per file.
void append_result_lines(const std::string& path, const RunRecord& rec);

/// Reads line-delimited results; a truncated or corrupt final line is skipped
/// with a warning pushed to `warnings`.  Corruption before the final line is
/// an error.
std::vector<ResultLine> read_result_lines(const std::string& path,
                                          std::vector<std::string>* warnings = nullptr);

/// Concatenates shard files into one output, skipping truncated final lines.
void merge_result_files(const std::vector<std::string>& inputs, const std::string& output);

/// Emits a comma-separated table for external plotting.  kind = "tails" gives
/// columns epsilon,R,p_hat,err from tail_prob rows; any other kind selects
/// rows by observable name with columns epsilon,observable,estimate,error.
/// Values round-trip exactly (shortest-representation doubles).
void export_plot_data(const std::string& records_path, const std::string& kind,
                      const std::string& out_path);

/// Discrete path persistence (JSON; exact double round-trip).
void save_path(const DiscretePath& path, const std::string& file);
DiscretePath load_path(const std::string& file);

}  // namespace torusns
