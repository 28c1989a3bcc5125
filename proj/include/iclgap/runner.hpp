#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iclgap/client.hpp"
#include "iclgap/corpus.hpp"
#include "iclgap/metrics.hpp"
#include "iclgap/settings.hpp"

namespace iclgap {

// Everything needed to reproduce a run. The serialized snapshot excludes
// out_dir, concurrency, and retry: changing those must not invalidate a
// resumable record.
struct RunConfig {
  DatasetDescriptor dataset;  // descriptor ids are empty until configured
  std::string train_path;
  std::string test_path;
  std::optional<FileFormat> format;  // unset: inferred from extension

  std::vector<EvalSetting> settings = {EvalSetting::TestToTest, EvalSetting::TrainToTrain,
                                       EvalSetting::TestToTrain, EvalSetting::TrainToTest};
  int shots = 5;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  // Upper bound on evaluated queries per (setting, seed); must be at least 1.
  // Bounds at or above the target split size evaluate every query.
  int max_queries = 1045;

  ModelEndpoint endpoint;
  // max_tokens <= 0 means: resolve per dataset at run time.
  CompletionParams params = {.max_tokens = 0};
  int resamples = 5000;
  double level = 0.95;

  std::string out_dir = ".";
  std::string model_label;  // default: endpoint kind name
  bool store_prompts = false;
  int concurrency = 0;  // 0 = all hardware threads; 1 = serial path
  RetryPolicy retry;
  std::string templates_file;

  void validate() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_json_file(const std::string& path);
  // Reproducibility snapshot embedded in the record header.
  nlohmann::json snapshot_json() const;

  std::string resolved_label() const;
  std::string record_filename() const;
};

// One scored query. error is empty on success; a failed completion keeps the
// entry (matched = false) with the reason recorded.
struct RunEntry {
  EvalSetting setting = EvalSetting::TestToTest;
  std::uint64_t seed = 0;
  std::int32_t example_id = -1;
  std::vector<std::int32_t> exemplar_ids;
  double coverage = 0.0;
  std::string prompt_hash;
  std::string raw_completion;
  bool matched = false;
  std::string error;
  std::optional<std::string> prompt;

  nlohmann::json to_json() const;
  static RunEntry from_json(const nlohmann::json& j);
};

struct AggregateRow {
  EvalSetting setting = EvalSetting::TestToTest;
  std::uint64_t seed = 0;
  int n = 0;
  int n_matched = 0;
  double accuracy = 0.0;

  nlohmann::json to_json() const;
  static AggregateRow from_json(const nlohmann::json& j);
};

struct RunRecord {
  nlohmann::json config;
  std::vector<RunEntry> entries;
  std::vector<AggregateRow> aggregates;
};

// Executes every (setting, seed) batch and appends JSONL lines to the record
// file as results become final. Byte-identical output for any concurrency:
// entries land in canonical order (settings and seeds in config order,
// queries in subsample order). A partial file from an interrupted run is
// resumed, not recomputed; a record written under a different snapshot is
// rejected. Returns the record path.
std::string run(const RunConfig& config);

RunRecord load_record(const std::string& path);

// Aggregates one or more record files into gap reports. Records are grouped
// by (model_label, dataset, shots); each group must cover all four settings.
// Writes gap_<label>_<dataset>_<N>shot.json per group plus three CSV
// summaries (gap_vs_shots.csv, gap_vs_ood.csv, ood_vs_id.csv). Returns the
// gap-report paths.
std::vector<std::string> report(const std::vector<std::string>& record_paths,
                                const std::string& out_dir);

// Shell-style glob on the filename component (literal directory part).
std::vector<std::string> expand_glob(const std::string& pattern);

}  // namespace iclgap
