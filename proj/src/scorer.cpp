#include "iclgap/scorer.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace iclgap {
namespace {

std::string collapse_and_trim(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // swallows leading whitespace
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out += ' ';
    in_space = false;
    out += c;
  }
  return out;
}

void rtrim(std::string& s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
}

// Fixpoint of "strip one trailing period": repeats until no period remains at
// the end, which is what makes the whole pass idempotent.
void strip_trailing_periods(std::string& s) {
  while (!s.empty() && s.back() == '.') {
    s.pop_back();
    rtrim(s);
  }
}

// Splits on every top-level " . " separator, recursively, so no piece retains
// one (back-to-back separators leave them embedded after a single pass).
void split_conjuncts(std::string_view body, std::vector<std::string>& out) {
  const std::size_t sep = body.find(" . ");
  if (sep == std::string_view::npos) {
    out.emplace_back(body);
    return;
  }
  split_conjuncts(body.substr(0, sep), out);
  split_conjuncts(body.substr(sep + 3), out);
}

// Canonical conjunct: trimmed, and free of bare separator periods at either
// end ("." alone, leading ". ", trailing " ."), so reassembly and a second
// split return the identical list. Periods attached to identifiers stay.
std::string clean_conjunct(std::string_view piece) {
  std::string s = collapse_and_trim(piece);
  for (;;) {
    bool changed = false;
    if (!s.empty() && s.front() == '.' && (s.size() == 1 || s[1] == ' ')) {
      s.erase(0, 1);
      while (!s.empty() && s.front() == ' ') s.erase(0, 1);
      changed = true;
    }
    if (!s.empty() && s.back() == '.' && (s.size() == 1 || s[s.size() - 2] == ' ')) {
      s.pop_back();
      rtrim(s);
      changed = true;
    }
    if (!changed) return s;
  }
}

Normalized normalize_cfq(std::string base) {
  const std::size_t open = base.find('{');
  const std::size_t close = base.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    return {std::move(base), true};

  std::vector<std::string> conjuncts;
  {
    std::vector<std::string> raw;
    split_conjuncts(std::string_view(base).substr(open + 1, close - open - 1), raw);
    for (const std::string& piece : raw) {
      std::string c = clean_conjunct(piece);
      if (!c.empty()) conjuncts.push_back(std::move(c));
    }
  }
  std::sort(conjuncts.begin(), conjuncts.end());
  conjuncts.erase(std::unique(conjuncts.begin(), conjuncts.end()), conjuncts.end());

  std::string head = base.substr(0, open);
  std::string tail = base.substr(close + 1);
  rtrim(head);
  std::string body;
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    if (i) body += " . ";
    body += conjuncts[i];
  }

  const std::string tail_collapsed = collapse_and_trim(tail);  // named: views below must not dangle
  std::string out;
  for (std::string_view part :
       {std::string_view(head), std::string_view("{"), std::string_view(body),
        std::string_view("}"), std::string_view(tail_collapsed)}) {
    if (part.empty()) continue;
    if (!out.empty()) out += ' ';
    out += part;
  }
  return {std::move(out), false};
}

}  // namespace

Normalized normalize(const DatasetDescriptor& dataset, std::string_view output) {
  std::string base = collapse_and_trim(output);
  if (dataset.normalizer_id == "whitespace-only") return {std::move(base), false};
  strip_trailing_periods(base);
  if (dataset.normalizer_id == "strip-period") return {std::move(base), false};
  if (dataset.normalizer_id == "cfq-sparql") return normalize_cfq(std::move(base));
  throw ConfigError("unknown normalizer: " + dataset.normalizer_id);
}

MatchOutcome exact_match(const DatasetDescriptor& dataset, std::string_view prediction,
                         std::string_view gold, std::int32_t example_id) {
  MatchOutcome out;
  out.example_id = example_id;
  out.prediction_normalized = normalize(dataset, prediction).text;
  out.gold_normalized = normalize(dataset, gold).text;
  out.matched = out.prediction_normalized == out.gold_normalized;
  return out;
}

}  // namespace iclgap
