#include "iclgap/corpus.hpp"

#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

namespace iclgap {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const std::set<std::string>* known_ids(std::string_view which) {
  static const std::set<std::string> tokenizers = {"scan-actions", "sparql", "funql",
                                                   "whitespace"};
  static const std::set<std::string> normalizers = {"cfq-sparql", "strip-period",
                                                    "whitespace-only"};
  return which == "tokenizer" ? &tokenizers : &normalizers;
}

}  // namespace

const char* split_name(Split s) { return s == Split::Train ? "train" : "test"; }

const char* dataset_id_name(DatasetId id) {
  switch (id) {
    case DatasetId::Cfq: return "cfq";
    case DatasetId::Scan: return "scan";
    case DatasetId::GeoQuery: return "geoquery";
    default: return "custom";
  }
}

DatasetId dataset_id_from_string(std::string_view name) {
  if (name == "cfq") return DatasetId::Cfq;
  if (name == "scan") return DatasetId::Scan;
  if (name == "geoquery") return DatasetId::GeoQuery;
  if (name == "custom") return DatasetId::Custom;
  throw ConfigError("unknown dataset id: " + std::string(name));
}

DatasetDescriptor DatasetDescriptor::builtin(DatasetId id) {
  switch (id) {
    case DatasetId::Cfq:
      return {DatasetId::Cfq, "sparql", "cfq", "cfq-sparql"};
    case DatasetId::Scan:
      return {DatasetId::Scan, "scan-actions", "scan", "strip-period"};
    case DatasetId::GeoQuery:
      return {DatasetId::GeoQuery, "funql", "geoquery", "strip-period"};
    default:
      throw ConfigError("custom datasets have no built-in descriptor");
  }
}

void DatasetDescriptor::validate() const {
  if (!known_ids("tokenizer")->count(formal_tokenizer_id))
    throw ConfigError("unknown formal tokenizer: " + formal_tokenizer_id);
  if (!known_ids("normalizer")->count(normalizer_id))
    throw ConfigError("unknown normalizer: " + normalizer_id);
  if (template_id.empty()) throw ConfigError("dataset template id must be non-empty");
}

FileFormat format_from_path(const std::string& path) {
  auto ends_with = [&](std::string_view suf) {
    return path.size() >= suf.size() &&
           path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".tsv")) return FileFormat::Tsv;
  if (ends_with(".jsonl")) return FileFormat::Jsonl;
  throw ConfigError("cannot infer file format from path: " + path);
}

std::vector<Example> load_split(const std::string& path, FileFormat format, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open dataset file: " + path);

  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw LoadError(path + ":" + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::string input_text, output_text;
    if (format == FileFormat::Tsv) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos) fail("expected one TAB separator");
      if (line.find('\t', tab + 1) != std::string::npos) fail("more than one TAB");
      input_text = trim(line.substr(0, tab));
      output_text = trim(line.substr(tab + 1));
    } else {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
      }
      if (!j.is_object() || !j.contains("input") || !j.contains("output") ||
          !j["input"].is_string() || !j["output"].is_string())
        fail("expected object with string fields \"input\" and \"output\"");
      input_text = trim(j["input"].get<std::string>());
      output_text = trim(j["output"].get<std::string>());
    }
    if (input_text.empty()) fail("empty input text");
    if (output_text.empty()) fail("empty output text");

    Example ex;
    ex.id = static_cast<std::int32_t>(out.size());
    ex.input_text = std::move(input_text);
    ex.output_text = std::move(output_text);
    ex.split = split;
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw LoadError("dataset file has no examples: " + path);
  return out;
}

void save_split(const std::string& path, std::span<const Example> examples,
                FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot open file for writing: " + path);
  for (const Example& ex : examples) {
    if (format == FileFormat::Tsv) {
      out << ex.input_text << '\t' << ex.output_text << '\n';
    } else {
      nlohmann::json j{{"input", ex.input_text}, {"output", ex.output_text}};
      out << j.dump() << '\n';
    }
  }
  if (!out) throw LoadError("write failed: " + path);
}

}  // namespace iclgap
