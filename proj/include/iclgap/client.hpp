#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iclgap/corpus.hpp"
#include "iclgap/prompt.hpp"

namespace iclgap {

struct CompletionParams {
  int max_tokens = 256;
  double temperature = 0.0;  // greedy decoding in all default configurations
  std::vector<std::string> stop_sequences = {"\n\n"};
};

enum class EndpointKind { HttpCompletion, OracleMock, NoiseMock };

const char* endpoint_kind_name(EndpointKind kind);
EndpointKind endpoint_kind_from_string(std::string_view name);

struct ModelEndpoint {
  EndpointKind kind = EndpointKind::OracleMock;
  std::string url;       // HttpCompletion only; must be non-empty there
  std::string auth_env;  // name of the env var holding the bearer token
  double noise_p = 0.0;  // NoiseMock corruption probability
  std::uint64_t mock_seed = 0;

  void validate() const;
};

struct RetryPolicy {
  int max_retries = 3;   // attempts after the first
  int backoff_ms = 500;  // doubled per retry
  int timeout_s = 60;    // per-request connect/read/write timeout
};

// input text -> gold output; first occurrence wins on duplicate inputs.
using GoldTable = std::unordered_map<std::string, std::string>;

GoldTable build_gold_table(std::span<const Example> train, std::span<const Example> test);

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;

  // Returns the raw completion text. HTTP transport failures, non-success
  // statuses, and malformed responses are retried with exponential backoff;
  // exhausted retries throw Error (callers record the failure per example).
  virtual std::string complete(const std::string& prompt, const CompletionParams& params) = 0;
};

// Resolves a query's gold output by parsing the query input back out of the
// prompt (the text after the final line-initial input_prefix).
class OracleMockClient : public CompletionClient {
 public:
  OracleMockClient(GoldTable gold, PromptTemplate tmpl);
  std::string complete(const std::string& prompt, const CompletionParams& params) override;

 private:
  GoldTable gold_;
  PromptTemplate tmpl_;
};

// Returns gold with probability 1-p, otherwise a corrupted string that can
// never match gold under normalization. The per-call stream derives from
// (seed, prompt hash), so outcomes are reproducible and independent of call
// order.
class NoiseMockClient : public CompletionClient {
 public:
  NoiseMockClient(GoldTable gold, PromptTemplate tmpl, double p, std::uint64_t seed);
  std::string complete(const std::string& prompt, const CompletionParams& params) override;

 private:
  GoldTable gold_;
  PromptTemplate tmpl_;
  double p_;
  std::uint64_t seed_;
};

// Builds the client for an endpoint. Mocks receive the gold table; the HTTP
// client reads its bearer token from the endpoint's auth_env variable.
std::unique_ptr<CompletionClient> make_client(const ModelEndpoint& endpoint,
                                              const PromptTemplate& tmpl,
                                              const GoldTable* gold,
                                              const RetryPolicy& retry);

// Truncates a raw completion at the first blank line or the first
// line-initial occurrence of the template's input_prefix, then trims
// surrounding whitespace. Idempotent.
std::string extract_prediction(std::string_view raw, const PromptTemplate& tmpl);

// The text after the final line-initial input_prefix, up to end of line.
// Exposed for the mock clients and their tests.
std::string query_input_of_prompt(std::string_view prompt, const PromptTemplate& tmpl);

}  // namespace iclgap
