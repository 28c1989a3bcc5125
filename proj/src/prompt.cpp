#include "iclgap/prompt.hpp"

#include <fstream>

#include <json.hpp>

namespace iclgap {

void PromptTemplate::validate() const {
  auto ends_marker = [](const std::string& s) {
    return s.size() >= 2 && s.compare(s.size() - 2, 2, ": ") == 0;
  };
  if (!ends_marker(input_prefix))
    throw ConfigError("template input_prefix must end with \": \"");
  if (!ends_marker(output_prefix))
    throw ConfigError("template output_prefix must end with \": \"");
  if (input_prefix == output_prefix)
    throw ConfigError("template input_prefix and output_prefix must differ");
  if (pair_separator.empty()) throw ConfigError("template pair_separator must be non-empty");
}

PromptTemplate builtin_template(const std::string& template_id) {
  PromptTemplate t;
  if (template_id == "cfq") {
    t.prefix_text =
        "As a programmer, I can correctly translate any complicated question to a "
        "SPARQL query.";
    t.input_prefix = "Question: ";
    t.output_prefix = "Query: ";
  } else if (template_id == "scan") {
    t.prefix_text =
        "Here are some examples of converting complicated commands to correct "
        "navigation actions.";
    t.input_prefix = "Command: ";
    t.output_prefix = "Actions: ";
  } else if (template_id == "geoquery") {
    t.prefix_text =
        "As a programmer, I can correctly translate any complicated question to a "
        "meaning representation query.";
    t.input_prefix = "Question: ";
    t.output_prefix = "Query: ";
  } else {
    throw ConfigError("unknown built-in template: " + template_id);
  }
  return t;
}

std::map<std::string, PromptTemplate> load_templates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open template file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("invalid template file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw LoadError("template file must hold a JSON object: " + path);

  std::map<std::string, PromptTemplate> out;
  for (auto& [key, val] : j.items()) {
    if (!val.is_object() || !val.contains("prefix_text") || !val.contains("input_prefix") ||
        !val.contains("output_prefix"))
      throw LoadError("template \"" + key +
                      "\" needs prefix_text, input_prefix, output_prefix");
    PromptTemplate t;
    t.prefix_text = val.at("prefix_text").get<std::string>();
    t.input_prefix = val.at("input_prefix").get<std::string>();
    t.output_prefix = val.at("output_prefix").get<std::string>();
    if (val.contains("pair_separator"))
      t.pair_separator = val.at("pair_separator").get<std::string>();
    t.validate();
    out.emplace(key, std::move(t));
  }
  return out;
}

PromptTemplate resolve_template(const DatasetDescriptor& dataset,
                                const std::string& templates_path) {
  if (!templates_path.empty()) {
    auto loaded = load_templates(templates_path);
    auto it = loaded.find(dataset.template_id);
    if (it != loaded.end()) return it->second;
  }
  return builtin_template(dataset.template_id);
}

std::string render_prompt(const PromptTemplate& tmpl, std::span<const Example> exemplars,
                          std::string_view query_input) {
  if (exemplars.empty()) throw ArgumentError("render_prompt: exemplar list is empty");
  std::string out = tmpl.prefix_text;
  for (const Example& ex : exemplars) {
    out += tmpl.pair_separator;
    out += tmpl.input_prefix;
    out += ex.input_text;
    out += '\n';
    out += tmpl.output_prefix;
    out += ex.output_text;
  }
  out += tmpl.pair_separator;
  out += tmpl.input_prefix;
  out += query_input;
  out += '\n';
  out += tmpl.output_prefix;  // generation point: ends ": ", no newline
  return out;
}

std::string render_prompt(const PromptTemplate& tmpl, std::span<const Example> pool,
                          std::span<const std::uint32_t> picks,
                          std::string_view query_input) {
  std::vector<Example> chosen;
  chosen.reserve(picks.size());
  for (std::uint32_t pos : picks) {
    if (pos >= pool.size()) throw ArgumentError("render_prompt: pick out of range");
    chosen.push_back(pool[pos]);
  }
  return render_prompt(tmpl, chosen, query_input);
}

}  // namespace iclgap
