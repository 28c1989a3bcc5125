#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iclgap/errors.hpp"

namespace iclgap {

enum class Split { Train, Test };

const char* split_name(Split s);

// One semantic-parsing pair. Fields are trimmed of surrounding whitespace on
// load and must be non-empty; interior whitespace is preserved verbatim.
struct Example {
  std::int32_t id = 0;  // dense file-order index within (dataset, split)
  std::string input_text;
  std::string output_text;
  Split split = Split::Train;
};

enum class DatasetId { Cfq, Scan, GeoQuery, Custom };

const char* dataset_id_name(DatasetId id);
DatasetId dataset_id_from_string(std::string_view name);  // ConfigError on unknown

// Binds a dataset to its formal tokenizer, prompt template, and output
// normalizer. The three built-in datasets have fixed bindings; Custom
// datasets supply all three ids explicitly.
struct DatasetDescriptor {
  DatasetId id = DatasetId::Custom;
  std::string formal_tokenizer_id;  // "scan-actions" | "sparql" | "funql" | "whitespace"
  std::string template_id;          // "cfq" | "scan" | "geoquery" | custom key
  std::string normalizer_id;        // "cfq-sparql" | "strip-period" | "whitespace-only"

  static DatasetDescriptor builtin(DatasetId id);  // ConfigError for Custom
  void validate() const;                           // ConfigError on unknown ids
};

enum class FileFormat { Tsv, Jsonl };

// Infers the format from the file extension (".tsv" / ".jsonl").
FileFormat format_from_path(const std::string& path);

// Loads one split. TSV lines carry exactly one TAB; JSONL objects carry
// string fields "input" and "output". Ids are assigned 0..n-1 in file order.
// Malformed or empty input raises LoadError naming the offending line.
std::vector<Example> load_split(const std::string& path, FileFormat format, Split split);

void save_split(const std::string& path, std::span<const Example> examples, FileFormat format);

}  // namespace iclgap
