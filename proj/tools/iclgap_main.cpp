#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iclgap/runner.hpp"
#include "iclgap/sampler.hpp"

namespace {

using namespace iclgap;

struct RunCli {
  std::string config_path;
  std::string dataset;
  std::string train_path;
  std::string test_path;
  std::vector<std::string> settings;
  int shots = -1;
  std::vector<std::uint64_t> seeds;
  int max_queries = -1;
  std::string endpoint_url;
  std::string mock;
  std::uint64_t mock_seed = 0;
  bool mock_seed_set = false;
  std::string out_dir;
  std::string model_label;
  std::string templates_file;
  int concurrency = -1;
  bool store_prompts = false;
};

std::vector<EvalSetting> parse_setting_codes(const std::vector<std::string>& codes) {
  std::vector<EvalSetting> out;
  for (const std::string& code : codes) {
    const auto s = setting_from_code(code);
    if (!s) throw ConfigError("unknown setting code: " + code + " (use tt, rr, tr, rt)");
    out.push_back(*s);
  }
  return out;
}

RunConfig assemble_run_config(const RunCli& cli) {
  RunConfig cfg;
  if (!cli.config_path.empty()) cfg = RunConfig::from_json_file(cli.config_path);
  if (!cli.dataset.empty())
    cfg.dataset = DatasetDescriptor::builtin(dataset_id_from_string(cli.dataset));
  if (!cli.train_path.empty()) cfg.train_path = cli.train_path;
  if (!cli.test_path.empty()) cfg.test_path = cli.test_path;
  if (!cli.settings.empty()) cfg.settings = parse_setting_codes(cli.settings);
  if (cli.shots > 0) cfg.shots = cli.shots;
  if (!cli.seeds.empty()) cfg.seeds = cli.seeds;
  if (cli.max_queries > 0) cfg.max_queries = cli.max_queries;
  if (!cli.endpoint_url.empty()) {
    cfg.endpoint.kind = EndpointKind::HttpCompletion;
    cfg.endpoint.url = cli.endpoint_url;
  }
  if (!cli.mock.empty()) {
    if (cli.mock == "oracle") {
      cfg.endpoint = ModelEndpoint{};
      cfg.endpoint.kind = EndpointKind::OracleMock;
    } else if (cli.mock.rfind("noise:", 0) == 0) {
      cfg.endpoint = ModelEndpoint{};
      cfg.endpoint.kind = EndpointKind::NoiseMock;
      try {
        cfg.endpoint.noise_p = std::stod(cli.mock.substr(6));
      } catch (const std::exception&) {
        throw ConfigError("--mock noise:<p> needs a numeric probability");
      }
    } else {
      throw ConfigError("--mock accepts \"oracle\" or \"noise:<p>\"");
    }
  }
  if (cli.mock_seed_set) cfg.endpoint.mock_seed = cli.mock_seed;
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (!cli.model_label.empty()) cfg.model_label = cli.model_label;
  if (!cli.templates_file.empty()) cfg.templates_file = cli.templates_file;
  if (cli.concurrency >= 0) cfg.concurrency = cli.concurrency;
  if (cli.store_prompts) cfg.store_prompts = true;
  return cfg;
}

int run_coverage(const std::string& dataset, const std::string& train_path,
                 const std::string& test_path, const std::vector<std::string>& codes,
                 const std::vector<int>& shot_counts, std::vector<std::uint64_t> seeds,
                 int max_queries, const std::string& out_path) {
  const DatasetDescriptor desc = DatasetDescriptor::builtin(dataset_id_from_string(dataset));
  const std::vector<Example> train =
      load_split(train_path, format_from_path(train_path), Split::Train);
  const std::vector<Example> test =
      load_split(test_path, format_from_path(test_path), Split::Test);
  if (seeds.empty()) seeds = {0, 1, 2, 3, 4};
  const std::vector<EvalSetting> settings =
      codes.empty() ? std::vector<EvalSetting>(kAllSettings.begin(), kAllSettings.end())
                    : parse_setting_codes(codes);

  std::string csv = "dataset,setting,shots,seed_count,mean_coverage_percent\n";
  for (EvalSetting setting : settings) {
    const auto& queries = target_split(setting) == Split::Train ? train : test;
    const auto& pool = source_split(setting) == Split::Train ? train : test;
    for (int k : shot_counts) {
      const double pct = coverage_stats(desc, setting, queries, pool, k, seeds,
                                        max_queries > 0 ? static_cast<std::uint32_t>(max_queries)
                                                        : 0);
      char row[256];
      std::snprintf(row, sizeof row, "%s,%s,%d,%zu,%.6f\n", dataset.c_str(),
                    setting_code(setting), k, seeds.size(), pct);
      csv += row;
    }
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    FILE* f = std::fopen(out_path.c_str(), "wb");
    if (!f) throw LoadError("cannot open file for writing: " + out_path);
    std::fputs(csv.c_str(), f);
    std::fclose(f);
    std::printf("%s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-shot generalization-gap evaluation harness"};
  app.require_subcommand(1);

  RunCli rc;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute an evaluation run");
  run_cmd->add_option("--config", rc.config_path, "JSON run configuration");
  run_cmd->add_option("--dataset", rc.dataset, "Built-in dataset: cfq, scan, geoquery");
  run_cmd->add_option("--train", rc.train_path, "Train split file (.tsv or .jsonl)");
  run_cmd->add_option("--test", rc.test_path, "Test split file (.tsv or .jsonl)");
  run_cmd->add_option("--setting", rc.settings, "Setting code tt/rr/tr/rt (repeatable)");
  run_cmd->add_option("--shots", rc.shots, "Exemplars per prompt");
  run_cmd->add_option("--seed", rc.seeds, "Seed (repeatable, replaces config seeds)");
  run_cmd->add_option("--max-queries", rc.max_queries, "Query cap per setting and seed");
  run_cmd->add_option("--endpoint", rc.endpoint_url, "HTTP completion endpoint URL");
  run_cmd->add_option("--mock", rc.mock, "Mock endpoint: oracle or noise:<p>");
  run_cmd->add_option("--mock-seed", rc.mock_seed, "Noise mock seed")
      ->each([&rc](const std::string&) { rc.mock_seed_set = true; });
  run_cmd->add_option("--out", rc.out_dir, "Output directory");
  run_cmd->add_option("--model-label", rc.model_label, "Label used in record/report names");
  run_cmd->add_option("--templates", rc.templates_file, "JSON prompt template file");
  run_cmd->add_option("--concurrency", rc.concurrency, "Worker threads (0 = all cores)");
  run_cmd->add_flag("--store-prompts", rc.store_prompts, "Store full prompts in the record");

  std::string records_glob;
  std::string report_out = ".";
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate records into gap reports");
  report_cmd->add_option("--records", records_glob, "Record file path or glob")->required();
  report_cmd->add_option("--out", report_out, "Output directory");

  std::string cov_dataset, cov_train, cov_test, cov_out;
  std::vector<std::string> cov_settings;
  std::vector<int> cov_shots{1, 5, 10};
  std::vector<std::uint64_t> cov_seeds;
  int cov_max_queries = 0;
  CLI::App* cov_cmd = app.add_subcommand("coverage", "Primitive coverage statistics (CSV)");
  cov_cmd->add_option("--dataset", cov_dataset, "Built-in dataset: cfq, scan, geoquery")
      ->required();
  cov_cmd->add_option("--train", cov_train, "Train split file")->required();
  cov_cmd->add_option("--test", cov_test, "Test split file")->required();
  cov_cmd->add_option("--setting", cov_settings, "Setting code (repeatable; default all)");
  cov_cmd->add_option("--shots", cov_shots, "Shot counts (repeatable)");
  cov_cmd->add_option("--seed", cov_seeds, "Seed (repeatable)");
  cov_cmd->add_option("--max-queries", cov_max_queries, "Per-seed query subsample cap");
  cov_cmd->add_option("--out", cov_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) {
      const RunConfig cfg = assemble_run_config(rc);
      std::printf("%s\n", iclgap::run(cfg).c_str());
      return 0;
    }
    if (report_cmd->parsed()) {
      const std::vector<std::string> paths = expand_glob(records_glob);
      if (paths.empty()) throw ConfigError("no record files match: " + records_glob);
      for (const std::string& p : report(paths, report_out)) std::printf("%s\n", p.c_str());
      return 0;
    }
    return run_coverage(cov_dataset, cov_train, cov_test, cov_settings, cov_shots, cov_seeds,
                        cov_max_queries, cov_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const LoadError& e) {
    std::fprintf(stderr, "load error: %s\n", e.what());
    return 1;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "argument error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
