#include "iclgap/primitives.hpp"

#include <algorithm>
#include <cctype>

namespace iclgap {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> whitespace_chunks(std::string_view text) {
  std::vector<std::string_view> chunks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) chunks.push_back(text.substr(i, j - i));
    i = j;
  }
  return chunks;
}

// Splits each whitespace chunk further: every character in `seps` becomes a
// standalone token, runs between them stay intact. A chunk made of one
// separator is itself a token; nothing else inside a chunk is dropped.
std::vector<std::string> split_on_separators(std::string_view text, std::string_view seps) {
  std::vector<std::string> tokens;
  for (std::string_view chunk : whitespace_chunks(text)) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (seps.find(chunk[i]) != std::string_view::npos) {
        if (i > start) tokens.emplace_back(chunk.substr(start, i - start));
        tokens.emplace_back(1, chunk[i]);
        start = i + 1;
      }
    }
    if (start < chunk.size()) tokens.emplace_back(chunk.substr(start));
  }
  return tokens;
}

bool check_balance(std::span<const std::string> tokens, std::string_view opens,
                   std::string_view closes) {
  std::vector<char> stack;
  for (const std::string& t : tokens) {
    if (t.size() != 1) continue;
    const std::size_t o = opens.find(t[0]);
    if (o != std::string_view::npos) {
      stack.push_back(closes[o]);
      continue;
    }
    if (closes.find(t[0]) != std::string_view::npos) {
      if (stack.empty() || stack.back() != t[0]) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

}  // namespace

PrimitiveSet::PrimitiveSet(std::vector<Primitive> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool PrimitiveSet::contains(const Primitive& p) const {
  return std::binary_search(items_.begin(), items_.end(), p);
}

std::size_t PrimitiveSet::intersection_size(const PrimitiveSet& other) const {
  std::size_t n = 0;
  auto a = items_.begin();
  auto b = other.items_.begin();
  while (a != items_.end() && b != other.items_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++n;
      ++a;
      ++b;
    }
  }
  return n;
}

std::vector<std::string> tokenize_natural(std::string_view text) {
  std::vector<std::string> words;
  for (std::string_view chunk : whitespace_chunks(text)) {
    std::size_t b = 0, e = chunk.size();
    auto is_punct = [](char c) { return c == '.' || c == ',' || c == '?'; };
    while (b < e && is_punct(chunk[b])) ++b;
    while (e > b && is_punct(chunk[e - 1])) --e;
    if (b == e) continue;
    std::string w(chunk.substr(b, e - b));
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.push_back(std::move(w));
  }
  return words;
}

FormalTokens tokenize_formal(const DatasetDescriptor& dataset, std::string_view text) {
  FormalTokens out;
  const std::string& id = dataset.formal_tokenizer_id;
  if (id == "sparql") {
    out.tokens = split_on_separators(text, "{}(),*");
    out.balanced = check_balance(out.tokens, "{(", "})");
  } else if (id == "funql") {
    out.tokens = split_on_separators(text, "(),");
    out.balanced = check_balance(out.tokens, "(", ")");
  } else if (id == "scan-actions") {
    std::string_view body = text;
    while (!body.empty() && is_space(body.back())) body.remove_suffix(1);
    if (!body.empty() && body.back() == '.') body.remove_suffix(1);
    for (std::string_view chunk : whitespace_chunks(body)) out.tokens.emplace_back(chunk);
  } else if (id == "whitespace") {
    for (std::string_view chunk : whitespace_chunks(text)) out.tokens.emplace_back(chunk);
  } else {
    throw ConfigError("unknown formal tokenizer: " + id);
  }
  return out;
}

PrimitiveSet primitives_of(const Example& example, const DatasetDescriptor& dataset) {
  std::vector<Primitive> items;
  for (std::string& w : tokenize_natural(example.input_text))
    items.push_back({Origin::InputWord, std::move(w)});
  for (std::string& t : tokenize_formal(dataset, example.output_text).tokens)
    items.push_back({Origin::OutputToken, std::move(t)});
  return PrimitiveSet(std::move(items));
}

PrimitiveInventory build_inventory(std::span<const Example> pool,
                                   const DatasetDescriptor& dataset) {
  PrimitiveInventory inv;
  inv.pool_size = static_cast<std::uint32_t>(pool.size());
  for (const Example& ex : pool) {
    const PrimitiveSet set = primitives_of(ex, dataset);  // keep alive for items()
    for (const Primitive& p : set.items()) ++inv.counts[p];
  }
  return inv;
}

}  // namespace iclgap
