#include "iclgap/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include <fnmatch.h>
#include <omp.h>

#include "iclgap/primitives.hpp"
#include "iclgap/prompt.hpp"
#include "iclgap/rng.hpp"
#include "iclgap/sampler.hpp"
#include "iclgap/scorer.hpp"

namespace fs = std::filesystem;

namespace iclgap {
namespace {

// Fixed base for report-time confidence intervals: reports must be
// reproducible from record files alone.
constexpr std::uint64_t kReportCiSeed = 0;

std::string sanitize_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                    c == '-';
    out += ok ? c : '-';
  }
  return out.empty() ? std::string("model") : out;
}

std::string dataset_label(const DatasetDescriptor& d) {
  if (d.id != DatasetId::Custom) return dataset_id_name(d.id);
  return "custom-" + sanitize_label(d.template_id);
}

nlohmann::json dataset_to_json(const DatasetDescriptor& d) {
  return nlohmann::json{{"id", dataset_id_name(d.id)},
                        {"formal_tokenizer_id", d.formal_tokenizer_id},
                        {"template_id", d.template_id},
                        {"normalizer_id", d.normalizer_id}};
}

DatasetDescriptor dataset_from_json(const nlohmann::json& j) {
  if (j.is_string()) return DatasetDescriptor::builtin(dataset_id_from_string(j.get<std::string>()));
  if (!j.is_object()) throw ConfigError("dataset must be a name or an object");
  DatasetDescriptor d;
  d.id = j.contains("id") ? dataset_id_from_string(j.at("id").get<std::string>())
                          : DatasetId::Custom;
  if (d.id != DatasetId::Custom) {
    d = DatasetDescriptor::builtin(d.id);
    // Explicit fields override the built-in bindings.
  }
  if (j.contains("formal_tokenizer_id"))
    d.formal_tokenizer_id = j.at("formal_tokenizer_id").get<std::string>();
  if (j.contains("template_id")) d.template_id = j.at("template_id").get<std::string>();
  if (j.contains("normalizer_id")) d.normalizer_id = j.at("normalizer_id").get<std::string>();
  return d;
}

EvalSetting setting_from_json(const nlohmann::json& j) {
  const auto code = j.get<std::string>();
  const auto s = setting_from_code(code);
  if (!s) throw ConfigError("unknown setting code: " + code + " (use tt, rr, tr, rt)");
  return *s;
}

nlohmann::json endpoint_to_json(const ModelEndpoint& e) {
  return nlohmann::json{{"kind", endpoint_kind_name(e.kind)},
                        {"url", e.url},
                        {"auth_env", e.auth_env},
                        {"noise_p", e.noise_p},
                        {"mock_seed", e.mock_seed}};
}

ModelEndpoint endpoint_from_json(const nlohmann::json& j) {
  ModelEndpoint e;
  if (j.contains("kind")) e.kind = endpoint_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("url")) e.url = j.at("url").get<std::string>();
  if (j.contains("auth_env")) e.auth_env = j.at("auth_env").get<std::string>();
  if (j.contains("noise_p")) e.noise_p = j.at("noise_p").get<double>();
  if (j.contains("mock_seed")) e.mock_seed = j.at("mock_seed").get<std::uint64_t>();
  return e;
}

}  // namespace

void RunConfig::validate() const {
  dataset.validate();
  endpoint.validate();
  if (train_path.empty() || test_path.empty())
    throw ConfigError("train_path and test_path are required");
  if (settings.empty()) throw ConfigError("at least one setting is required");
  std::set<EvalSetting> uniq(settings.begin(), settings.end());
  if (uniq.size() != settings.size()) throw ConfigError("settings contain duplicates");
  if (shots < 1) throw ConfigError("shots must be at least 1");
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("seeds contain duplicates");
  if (max_queries < 1) throw ConfigError("max_queries must be at least 1");
  if (resamples < 1) throw ConfigError("resamples must be at least 1");
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("level must lie strictly between 0 and 1");
  if (params.temperature < 0.0) throw ConfigError("temperature must be non-negative");
  if (concurrency < 0) throw ConfigError("concurrency must be non-negative");
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  if (j.contains("dataset")) c.dataset = dataset_from_json(j.at("dataset"));
  if (j.contains("train_path")) c.train_path = j.at("train_path").get<std::string>();
  if (j.contains("test_path")) c.test_path = j.at("test_path").get<std::string>();
  if (j.contains("format")) {
    const auto f = j.at("format").get<std::string>();
    if (f == "tsv")
      c.format = FileFormat::Tsv;
    else if (f == "jsonl")
      c.format = FileFormat::Jsonl;
    else
      throw ConfigError("unknown format: " + f);
  }
  if (j.contains("settings")) {
    c.settings.clear();
    for (const auto& s : j.at("settings")) c.settings.push_back(setting_from_json(s));
  }
  if (j.contains("shots")) c.shots = j.at("shots").get<int>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("max_queries")) c.max_queries = j.at("max_queries").get<int>();
  if (j.contains("endpoint")) c.endpoint = endpoint_from_json(j.at("endpoint"));
  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (p.contains("max_tokens")) c.params.max_tokens = p.at("max_tokens").get<int>();
    if (p.contains("temperature")) c.params.temperature = p.at("temperature").get<double>();
    if (p.contains("stop"))
      c.params.stop_sequences = p.at("stop").get<std::vector<std::string>>();
  }
  if (j.contains("resamples")) c.resamples = j.at("resamples").get<int>();
  if (j.contains("level")) c.level = j.at("level").get<double>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("model_label")) c.model_label = j.at("model_label").get<std::string>();
  if (j.contains("store_prompts")) c.store_prompts = j.at("store_prompts").get<bool>();
  if (j.contains("concurrency")) c.concurrency = j.at("concurrency").get<int>();
  if (j.contains("retry")) {
    const auto& r = j.at("retry");
    if (r.contains("max_retries")) c.retry.max_retries = r.at("max_retries").get<int>();
    if (r.contains("backoff_ms")) c.retry.backoff_ms = r.at("backoff_ms").get<int>();
    if (r.contains("timeout_s")) c.retry.timeout_s = r.at("timeout_s").get<int>();
  }
  if (j.contains("templates_file"))
    c.templates_file = j.at("templates_file").get<std::string>();
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("invalid config file " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::snapshot_json() const {
  nlohmann::json j;
  j["dataset"] = dataset_to_json(dataset);
  j["train_path"] = train_path;
  j["test_path"] = test_path;
  if (format) j["format"] = *format == FileFormat::Tsv ? "tsv" : "jsonl";
  nlohmann::json codes = nlohmann::json::array();
  for (EvalSetting s : settings) codes.push_back(setting_code(s));
  j["settings"] = codes;
  j["shots"] = shots;
  j["seeds"] = seeds;
  j["max_queries"] = max_queries;
  j["endpoint"] = endpoint_to_json(endpoint);
  j["params"] = nlohmann::json{{"max_tokens", params.max_tokens},
                               {"temperature", params.temperature},
                               {"stop", params.stop_sequences}};
  j["resamples"] = resamples;
  j["level"] = level;
  j["model_label"] = resolved_label();
  j["store_prompts"] = store_prompts;
  j["templates_file"] = templates_file;
  return j;
}

std::string RunConfig::resolved_label() const {
  return model_label.empty() ? endpoint_kind_name(endpoint.kind) : model_label;
}

std::string RunConfig::record_filename() const {
  return "record_" + sanitize_label(resolved_label()) + "_" + dataset_label(dataset) + "_" +
         std::to_string(shots) + "shot.jsonl";
}

nlohmann::json RunEntry::to_json() const {
  nlohmann::json j;
  j["type"] = "entry";
  j["setting"] = setting_code(setting);
  j["seed"] = seed;
  j["example_id"] = example_id;
  j["exemplar_ids"] = exemplar_ids;
  j["coverage"] = coverage;
  j["prompt_hash"] = prompt_hash;
  j["raw_completion"] = raw_completion;
  j["matched"] = matched;
  if (!error.empty()) j["error"] = error;
  if (prompt) j["prompt"] = *prompt;
  return j;
}

RunEntry RunEntry::from_json(const nlohmann::json& j) {
  RunEntry e;
  e.setting = setting_from_json(j.at("setting"));
  e.seed = j.at("seed").get<std::uint64_t>();
  e.example_id = j.at("example_id").get<std::int32_t>();
  e.exemplar_ids = j.at("exemplar_ids").get<std::vector<std::int32_t>>();
  e.coverage = j.at("coverage").get<double>();
  e.prompt_hash = j.at("prompt_hash").get<std::string>();
  e.raw_completion = j.at("raw_completion").get<std::string>();
  e.matched = j.at("matched").get<bool>();
  if (j.contains("error")) e.error = j.at("error").get<std::string>();
  if (j.contains("prompt")) e.prompt = j.at("prompt").get<std::string>();
  return e;
}

nlohmann::json AggregateRow::to_json() const {
  nlohmann::json j;
  j["type"] = "aggregate";
  j["setting"] = setting_code(setting);
  j["seed"] = seed;
  j["n"] = n;
  j["n_matched"] = n_matched;
  j["accuracy"] = accuracy;
  return j;
}

AggregateRow AggregateRow::from_json(const nlohmann::json& j) {
  AggregateRow a;
  a.setting = setting_from_json(j.at("setting"));
  a.seed = j.at("seed").get<std::uint64_t>();
  a.n = j.at("n").get<int>();
  a.n_matched = j.at("n_matched").get<int>();
  a.accuracy = j.at("accuracy").get<double>();
  return a;
}

namespace {

struct SplitData {
  std::vector<Example> examples;
  std::unique_ptr<PoolIndex> index;  // doubles as the per-example primitive cache
  PrimitiveInventory inventory;
  std::vector<std::int32_t> ids;
};

void build_pool_side(SplitData& s, const DatasetDescriptor& d) {
  s.index = std::make_unique<PoolIndex>(std::span<const Example>(s.examples), d);
  s.inventory = build_inventory(s.examples, d);
  s.ids.reserve(s.examples.size());
  for (const Example& ex : s.examples) s.ids.push_back(ex.id);
}

struct BatchKey {
  EvalSetting setting;
  std::uint64_t seed;
  auto operator<=>(const BatchKey&) const = default;
};

struct ResumeState {
  // matched flags of already-recorded entries, keyed per batch in file order
  std::map<BatchKey, std::vector<RunEntry>> entries;
  std::set<BatchKey> aggregates_done;
};

// Scans an existing record file. A malformed or unterminated tail is a crash
// artifact and gets truncated; malformed content followed by more data is an
// error. The header line must carry the same config snapshot.
ResumeState scan_existing_record(const std::string& path, const nlohmann::json& snapshot) {
  ResumeState state;
  std::string data;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open existing record: " + path);
    data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  std::size_t good = 0;  // byte length of the intact prefix
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) break;  // line never terminated
    const nlohmann::json j =
        nlohmann::json::parse(data.begin() + static_cast<std::ptrdiff_t>(pos),
                              data.begin() + static_cast<std::ptrdiff_t>(nl), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      if (nl + 1 < data.size()) throw LoadError(path + ": malformed record line mid-file");
      break;
    }
    const std::string type = j.value("type", "");
    if (!have_header) {
      if (type != "config" || !j.contains("config"))
        throw LoadError(path + ": first record line must hold the config snapshot");
      if (j.at("config") != snapshot)
        throw ConfigError(path +
                          " was written under a different configuration; "
                          "remove it or change out_dir");
      have_header = true;
    } else if (type == "entry") {
      RunEntry e = RunEntry::from_json(j);
      state.entries[{e.setting, e.seed}].push_back(std::move(e));
    } else if (type == "aggregate") {
      AggregateRow a = AggregateRow::from_json(j);
      state.aggregates_done.insert({a.setting, a.seed});
    } else {
      throw LoadError(path + ": unknown record line type: " + type);
    }
    pos = nl + 1;
    good = pos;
  }
  if (!have_header) throw LoadError(path + ": record file has no config header");
  if (good < data.size()) fs::resize_file(path, good);
  return state;
}

struct QueryTask {
  std::uint32_t query_pos;  // position in the target split
  std::int32_t example_id;
};

std::vector<QueryTask> batch_queries(const SplitData& target, EvalSetting setting,
                                     std::uint64_t seed, int max_queries) {
  const auto n = static_cast<std::uint32_t>(target.examples.size());
  const auto cap = static_cast<std::uint32_t>(max_queries);
  std::vector<QueryTask> tasks;
  if (cap >= n) {
    tasks.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) tasks.push_back({i, target.examples[i].id});
  } else {
    RngStream rng(derive_seed(seed, StreamTag::Subsample,
                              {static_cast<std::uint64_t>(setting_index(setting))}));
    for (std::uint32_t i : sample_without_replacement(n, cap, rng))
      tasks.push_back({i, target.examples[i].id});
  }
  return tasks;
}

}  // namespace

std::string run(const RunConfig& config) {
  config.validate();

  const FileFormat train_fmt = config.format.value_or(format_from_path(config.train_path));
  const FileFormat test_fmt = config.format.value_or(format_from_path(config.test_path));
  SplitData train, test;
  train.examples = load_split(config.train_path, train_fmt, Split::Train);
  test.examples = load_split(config.test_path, test_fmt, Split::Test);
  build_pool_side(train, config.dataset);
  build_pool_side(test, config.dataset);

  const PromptTemplate tmpl = resolve_template(config.dataset, config.templates_file);
  tmpl.validate();
  const GoldTable gold = build_gold_table(train.examples, test.examples);

  CompletionParams params = config.params;
  if (params.max_tokens <= 0)
    params.max_tokens = config.dataset.id == DatasetId::Scan ? 700 : 256;

  // Client construction validates endpoint config (auth env var, url) before
  // any batch starts.
  const std::unique_ptr<CompletionClient> client =
      make_client(config.endpoint, tmpl, &gold, config.retry);

  const nlohmann::json snapshot = config.snapshot_json();
  fs::create_directories(config.out_dir);
  const std::string record_path =
      (fs::path(config.out_dir) / config.record_filename()).string();

  ResumeState resume;
  if (fs::exists(record_path) && fs::file_size(record_path) > 0) {
    resume = scan_existing_record(record_path, snapshot);
  }

  std::ofstream out(record_path, std::ios::binary | std::ios::app);
  if (!out) throw LoadError("cannot open record for writing: " + record_path);
  if (!fs::file_size(record_path)) {
    out << nlohmann::json{{"type", "config"}, {"config", snapshot}}.dump() << '\n';
    out.flush();
  }

  const int threads = config.concurrency > 0 ? config.concurrency : omp_get_max_threads();

  for (EvalSetting setting : config.settings) {
    SplitData& source = source_split(setting) == Split::Train ? train : test;
    SplitData& target = target_split(setting) == Split::Train ? train : test;
    const bool id_regime = regime_of(setting) == Regime::InDistribution;
    const std::span<const Example> pool(source.examples);

    for (std::uint64_t seed : config.seeds) {
      const BatchKey key{setting, seed};
      // Aggregates are written after their batch's entries, so their presence
      // marks the batch complete.
      if (resume.aggregates_done.count(key)) continue;
      const std::vector<QueryTask> tasks =
          batch_queries(target, setting, seed, config.max_queries);

      std::vector<RunEntry>& done = resume.entries[key];
      std::set<std::int32_t> done_ids;
      for (const RunEntry& e : done) done_ids.insert(e.example_id);
      std::vector<std::size_t> todo;
      for (std::size_t i = 0; i < tasks.size(); ++i)
        if (!done_ids.count(tasks[i].example_id)) todo.push_back(i);

      auto eval_task = [&](std::size_t ti) {
        const QueryTask& task = tasks[todo[ti]];
        const Example& q = target.examples[task.query_pos];
        RngStream rng(derive_seed(seed, StreamTag::Exemplar,
                                  {static_cast<std::uint64_t>(setting_index(setting)),
                                   static_cast<std::uint64_t>(task.example_id)}));
        const std::uint32_t exclude = id_regime ? task.query_pos : kNoExclusion;
        const ShotSelection sel =
            select_covering(target.index->set_at(task.query_pos), *source.index, source.ids,
                            source.inventory, config.shots, rng, exclude);
        const std::string prompt = render_prompt(tmpl, pool, sel.picks, q.input_text);

        RunEntry e;
        e.setting = setting;
        e.seed = seed;
        e.example_id = task.example_id;
        e.exemplar_ids.reserve(sel.picks.size());
        for (std::uint32_t pos : sel.picks) e.exemplar_ids.push_back(source.ids[pos]);
        e.coverage = sel.coverage_fraction;
        e.prompt_hash = to_hex(fnv1a64(prompt));
        if (config.store_prompts) e.prompt = prompt;
        try {
          e.raw_completion = client->complete(prompt, params);
          const std::string pred = extract_prediction(e.raw_completion, tmpl);
          e.matched = exact_match(config.dataset, pred, q.output_text, q.id).matched;
        } catch (const Error& err) {
          e.error = err.what();
          e.matched = false;
        }
        return e;
      };

      std::vector<std::optional<RunEntry>> ready(todo.size());
      std::size_t flush = 0;
      std::atomic<std::size_t> next{0};
      auto flush_ready = [&]() {
        while (flush < ready.size() && ready[flush]) {
          out << ready[flush]->to_json().dump() << '\n';
          out.flush();
          done.push_back(std::move(*ready[flush]));
          ready[flush].reset();
          ++flush;
        }
      };

      if (threads == 1) {
        for (std::size_t ti = 0; ti < todo.size(); ++ti) {
          ready[ti] = eval_task(ti);
          flush_ready();
        }
      } else {
#pragma omp parallel num_threads(threads)
        {
          for (;;) {
            const std::size_t ti = next.fetch_add(1);
            if (ti >= todo.size()) break;
            RunEntry e = eval_task(ti);
#pragma omp critical(iclgap_record_flush)
            {
              ready[ti] = std::move(e);
              flush_ready();
            }
          }
        }
      }

      if (!resume.aggregates_done.count(key)) {
        AggregateRow agg;
        agg.setting = setting;
        agg.seed = seed;
        agg.n = static_cast<int>(done.size());
        for (const RunEntry& e : done) agg.n_matched += e.matched ? 1 : 0;
        agg.accuracy = agg.n ? static_cast<double>(agg.n_matched) / agg.n : 0.0;
        out << agg.to_json().dump() << '\n';
        out.flush();
      }
    }
  }
  return record_path;
}

RunRecord load_record(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open record: " + path);
  RunRecord rec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "config")
      rec.config = j.at("config");
    else if (type == "entry")
      rec.entries.push_back(RunEntry::from_json(j));
    else if (type == "aggregate")
      rec.aggregates.push_back(AggregateRow::from_json(j));
    else
      throw LoadError(path + ":" + std::to_string(line_no) + ": unknown line type");
  }
  if (rec.config.is_null()) throw LoadError(path + ": record has no config header");
  return rec;
}

namespace {

struct GroupKey {
  std::string model;
  std::string dataset;
  int shots = 0;
  auto operator<=>(const GroupKey&) const = default;
};

struct GroupData {
  // per setting: seed -> flags in record order
  std::array<std::map<std::uint64_t, std::vector<std::uint8_t>>, 4> flags;
  int resamples = 5000;
  double level = 0.95;
};

std::string csv_num(double v) { return nlohmann::json(v).dump(); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw LoadError("write failed: " + path);
}

}  // namespace

std::vector<std::string> report(const std::vector<std::string>& record_paths,
                                const std::string& out_dir) {
  if (record_paths.empty()) throw ArgumentError("report: no record files given");

  std::map<GroupKey, GroupData> groups;
  for (const std::string& path : record_paths) {
    const RunRecord rec = load_record(path);
    const DatasetDescriptor desc = dataset_from_json(rec.config.at("dataset"));
    GroupKey key{rec.config.at("model_label").get<std::string>(), dataset_label(desc),
                 rec.config.at("shots").get<int>()};
    GroupData& g = groups[key];
    g.resamples = rec.config.value("resamples", 5000);
    g.level = rec.config.value("level", 0.95);
    std::array<std::map<std::uint64_t, std::vector<std::uint8_t>>, 4> local;
    for (const RunEntry& e : rec.entries)
      local[static_cast<std::size_t>(setting_index(e.setting))][e.seed].push_back(
          e.matched ? 1 : 0);
    // A (setting, seed) cell already covered by an earlier record wins.
    for (std::size_t i = 0; i < 4; ++i)
      for (auto& [seed, flags] : local[i]) g.flags[i].emplace(seed, std::move(flags));
  }

  fs::create_directories(out_dir);
  std::vector<std::string> gap_paths;
  std::string csv_shots = "model,dataset,shots,relative_gap\n";
  std::string csv_ood = "model,dataset,shots,mean_ood,relative_gap\n";
  std::string csv_id = "model,dataset,shots,mean_id,mean_ood\n";

  for (auto& [key, g] : groups) {
    std::vector<std::string> missing;
    for (EvalSetting s : kAllSettings)
      if (g.flags[static_cast<std::size_t>(setting_index(s))].empty())
        missing.push_back(setting_name(s));
    if (!missing.empty()) {
      std::string names;
      for (const auto& m : missing) {
        if (!names.empty()) names += ", ";
        names += m;
      }
      throw ConfigError("records for " + key.model + "/" + key.dataset + "/" +
                        std::to_string(key.shots) + "shot are missing settings: " + names);
    }

    std::array<double, 4> acc{};
    std::array<CiBounds, 4> ci{};
    for (EvalSetting s : kAllSettings) {
      const auto i = static_cast<std::size_t>(setting_index(s));
      double sum = 0.0;
      std::vector<std::uint8_t> pooled;
      for (const auto& [seed, flags] : g.flags[i]) {  // ascending seed order
        sum += accuracy_of_flags(flags);
        pooled.insert(pooled.end(), flags.begin(), flags.end());
      }
      acc[i] = sum / static_cast<double>(g.flags[i].size());
      ci[i] = bootstrap_ci(pooled, g.resamples, g.level,
                           derive_seed(kReportCiSeed, StreamTag::Ci,
                                       {static_cast<std::uint64_t>(setting_index(s))}));
    }
    const GapReport gap = assemble_gap_report(acc, ci);

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(gap.to_json_string());
    j["model_label"] = key.model;
    j["dataset"] = key.dataset;
    j["shots"] = key.shots;

    // Per-seed gaps, for seeds evaluated in all four settings.
    nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
    for (const auto& [seed, flags] : g.flags[0]) {
      bool everywhere = true;
      for (std::size_t i = 1; i < 4; ++i)
        if (!g.flags[i].count(seed)) everywhere = false;
      if (!everywhere) continue;
      std::array<double, 4> sacc{};
      for (std::size_t i = 0; i < 4; ++i) sacc[i] = accuracy_of_flags(g.flags[i].at(seed));
      const GapReport sg = assemble_gap_report(sacc, {});
      nlohmann::ordered_json row;
      row["seed"] = seed;
      row["acc_test_test"] = sacc[setting_index(EvalSetting::TestToTest)];
      row["acc_train_train"] = sacc[setting_index(EvalSetting::TrainToTrain)];
      row["acc_test_train"] = sacc[setting_index(EvalSetting::TestToTrain)];
      row["acc_train_test"] = sacc[setting_index(EvalSetting::TrainToTest)];
      if (sg.relative_gap)
        row["relative_gap"] = *sg.relative_gap;
      else
        row["relative_gap"] = nullptr;
      per_seed.push_back(std::move(row));
    }
    j["per_seed"] = std::move(per_seed);

    const std::string gap_path =
        (fs::path(out_dir) / ("gap_" + sanitize_label(key.model) + "_" + key.dataset + "_" +
                              std::to_string(key.shots) + "shot.json"))
            .string();
    write_file(gap_path, j.dump(2) + "\n");
    gap_paths.push_back(gap_path);

    const std::string prefix =
        key.model + "," + key.dataset + "," + std::to_string(key.shots);
    const std::string gap_cell = gap.relative_gap ? csv_num(*gap.relative_gap) : "";
    csv_shots += prefix + "," + gap_cell + "\n";
    csv_ood += prefix + "," + csv_num(gap.mean_ood) + "," + gap_cell + "\n";
    csv_id += prefix + "," + csv_num(gap.mean_id) + "," + csv_num(gap.mean_ood) + "\n";
  }

  write_file((fs::path(out_dir) / "gap_vs_shots.csv").string(), csv_shots);
  write_file((fs::path(out_dir) / "gap_vs_ood.csv").string(), csv_ood);
  write_file((fs::path(out_dir) / "ood_vs_id.csv").string(), csv_id);
  return gap_paths;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const std::string name = p.filename().string();
  if (name.find_first_of("*?[") == std::string::npos) return {pattern};
  const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string fname = entry.path().filename().string();
    if (fnmatch(name.c_str(), fname.c_str(), 0) == 0)
      out.push_back((p.parent_path() / fname).string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace iclgap
