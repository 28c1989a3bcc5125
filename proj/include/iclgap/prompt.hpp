#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "iclgap/corpus.hpp"

namespace iclgap {

// Prompt layout: prefix_text, blank line, then each exemplar as
// input_prefix + input, newline, output_prefix + output, blank line; the
// query input follows with a bare output_prefix as the generation point.
// Line endings are LF throughout; outputs are never wrapped.
struct PromptTemplate {
  std::string prefix_text;
  std::string input_prefix;         // must end with ": "
  std::string output_prefix;        // must end with ": ", distinct from input_prefix
  std::string pair_separator = "\n\n";

  void validate() const;  // ConfigError on violated invariants
};

// Built-in templates "cfq", "scan", "geoquery".
PromptTemplate builtin_template(const std::string& template_id);

// Loads user templates from a JSON file keyed by template id, each entry
// holding prefix_text / input_prefix / output_prefix and an optional
// pair_separator.
std::map<std::string, PromptTemplate> load_templates(const std::string& path);

// Picks the descriptor's template from the built-ins, or from templates_path
// when given (file entries shadow built-ins).
PromptTemplate resolve_template(const DatasetDescriptor& dataset,
                                const std::string& templates_path = "");

std::string render_prompt(const PromptTemplate& tmpl, std::span<const Example> exemplars,
                          std::string_view query_input);

// Same rendering with exemplars addressed as positions into a pool.
std::string render_prompt(const PromptTemplate& tmpl, std::span<const Example> pool,
                          std::span<const std::uint32_t> picks,
                          std::string_view query_input);

}  // namespace iclgap
