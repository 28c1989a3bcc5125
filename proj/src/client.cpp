#include "iclgap/client.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "iclgap/rng.hpp"

namespace iclgap {
namespace {

std::string trim_copy(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

class HttpCompletionClient : public CompletionClient {
 public:
  HttpCompletionClient(const ModelEndpoint& endpoint, const RetryPolicy& retry)
      : retry_(retry) {
    const std::size_t scheme = endpoint.url.find("://");
    if (scheme == std::string::npos)
      throw ConfigError("endpoint url needs a scheme: " + endpoint.url);
    const std::size_t slash = endpoint.url.find('/', scheme + 3);
    base_ = endpoint.url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : endpoint.url.substr(slash);
    if (!endpoint.auth_env.empty()) {
      const char* token = std::getenv(endpoint.auth_env.c_str());
      if (!token || !*token)
        throw ConfigError("environment variable " + endpoint.auth_env +
                          " is not set (endpoint auth token)");
      token_ = token;
    }
  }

  std::string complete(const std::string& prompt, const CompletionParams& params) override {
    nlohmann::json body{{"prompt", prompt},
                        {"max_tokens", params.max_tokens},
                        {"temperature", params.temperature},
                        {"stop", params.stop_sequences}};
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<long long>(retry_.backoff_ms)
                                      << (attempt - 1)));
      httplib::Client cli(base_);
      cli.set_connection_timeout(retry_.timeout_s, 0);
      cli.set_read_timeout(retry_.timeout_s, 0);
      cli.set_write_timeout(retry_.timeout_s, 0);
      httplib::Headers headers;
      if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

      auto res = cli.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        last_error = "endpoint returned status " + std::to_string(res->status);
        continue;
      }
      try {
        nlohmann::json j = nlohmann::json::parse(res->body);
        nlohmann::json& text = j.at("choices").at(0).at("text");
        if (!text.is_string()) throw Error("choices[0].text is not a string");
        return text.get<std::string>();
      } catch (const std::exception& e) {
        last_error = std::string("malformed response: ") + e.what();
        continue;
      }
    }
    throw Error("completion failed after " + std::to_string(retry_.max_retries + 1) +
                " attempts: " + last_error);
  }

 private:
  RetryPolicy retry_;
  std::string base_;
  std::string path_;
  std::string token_;
};

const std::string& gold_for_prompt(const GoldTable& gold, const PromptTemplate& tmpl,
                                   const std::string& prompt) {
  const std::string input = query_input_of_prompt(prompt, tmpl);
  auto it = gold.find(input);
  if (it == gold.end()) throw Error("mock has no gold output for query input: " + input);
  return it->second;
}

}  // namespace

const char* endpoint_kind_name(EndpointKind kind) {
  switch (kind) {
    case EndpointKind::HttpCompletion: return "http";
    case EndpointKind::OracleMock: return "oracle-mock";
    default: return "noise-mock";
  }
}

EndpointKind endpoint_kind_from_string(std::string_view name) {
  if (name == "http") return EndpointKind::HttpCompletion;
  if (name == "oracle-mock") return EndpointKind::OracleMock;
  if (name == "noise-mock") return EndpointKind::NoiseMock;
  throw ConfigError("unknown endpoint kind: " + std::string(name));
}

void ModelEndpoint::validate() const {
  if (kind == EndpointKind::HttpCompletion && url.empty())
    throw ConfigError("http endpoints need a url");
  if (noise_p < 0.0 || noise_p > 1.0)
    throw ConfigError("noise probability must lie in [0, 1]");
}

GoldTable build_gold_table(std::span<const Example> train, std::span<const Example> test) {
  GoldTable gold;
  gold.reserve(train.size() + test.size());
  for (const Example& ex : train) gold.emplace(ex.input_text, ex.output_text);
  for (const Example& ex : test) gold.emplace(ex.input_text, ex.output_text);
  return gold;
}

OracleMockClient::OracleMockClient(GoldTable gold, PromptTemplate tmpl)
    : gold_(std::move(gold)), tmpl_(std::move(tmpl)) {}

std::string OracleMockClient::complete(const std::string& prompt, const CompletionParams&) {
  return gold_for_prompt(gold_, tmpl_, prompt);
}

NoiseMockClient::NoiseMockClient(GoldTable gold, PromptTemplate tmpl, double p,
                                 std::uint64_t seed)
    : gold_(std::move(gold)), tmpl_(std::move(tmpl)), p_(p), seed_(seed) {}

std::string NoiseMockClient::complete(const std::string& prompt, const CompletionParams&) {
  const std::string& gold = gold_for_prompt(gold_, tmpl_, prompt);
  // Stream keyed by prompt content, so outcomes do not depend on call order.
  RngStream rng(derive_seed(seed_, StreamTag::Noise, {fnv1a64(prompt)}));
  if (rng.next_double01() < p_) return gold + " zz_noise_zz";
  return gold;
}

std::unique_ptr<CompletionClient> make_client(const ModelEndpoint& endpoint,
                                              const PromptTemplate& tmpl,
                                              const GoldTable* gold,
                                              const RetryPolicy& retry) {
  endpoint.validate();
  switch (endpoint.kind) {
    case EndpointKind::HttpCompletion:
      return std::make_unique<HttpCompletionClient>(endpoint, retry);
    case EndpointKind::OracleMock:
      if (!gold) throw ArgumentError("oracle mock needs a gold table");
      return std::make_unique<OracleMockClient>(*gold, tmpl);
    default:
      if (!gold) throw ArgumentError("noise mock needs a gold table");
      return std::make_unique<NoiseMockClient>(*gold, tmpl, endpoint.noise_p,
                                               endpoint.mock_seed);
  }
}

std::string extract_prediction(std::string_view raw, const PromptTemplate& tmpl) {
  std::size_t b = 0;
  while (b < raw.size() && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  std::string_view s = raw.substr(b);

  std::size_t cut = s.find("\n\n");
  if (s.substr(0, tmpl.input_prefix.size()) == tmpl.input_prefix) {
    cut = 0;
  } else {
    const std::string marker = "\n" + tmpl.input_prefix;
    const std::size_t at = s.find(marker);
    if (at < cut) cut = at;
  }
  if (cut != std::string_view::npos) s = s.substr(0, cut);
  return trim_copy(s);
}

std::string query_input_of_prompt(std::string_view prompt, const PromptTemplate& tmpl) {
  const std::string marker = "\n" + tmpl.input_prefix;
  std::size_t start;
  const std::size_t at = prompt.rfind(marker);
  if (at != std::string_view::npos) {
    start = at + marker.size();
  } else if (prompt.substr(0, tmpl.input_prefix.size()) == tmpl.input_prefix) {
    start = tmpl.input_prefix.size();
  } else {
    throw ArgumentError("prompt has no line-initial input prefix");
  }
  const std::size_t end = prompt.find('\n', start);
  return std::string(
      prompt.substr(start, end == std::string_view::npos ? end : end - start));
}

}  // namespace iclgap
