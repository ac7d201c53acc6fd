#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace archie::llm {

// Key of a recorded exchange: SHA-256 hex of the prompt bytes. Sample
// indices above 0 (several completions of one prompt) hash the prompt
// followed by "\n#sample=<i>".
std::string fixture_key(std::string_view prompt, int sample_index = 0);

struct Fixture {
  std::string key;
  std::string prompt;
  std::string response;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json to_json(const Fixture& f);
// Throws Error(kParse) on missing fields.
Fixture fixture_from_json(const nlohmann::json& j);

// Directory of <key>.json files.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(std::string_view key) const;
  std::optional<Fixture> find(std::string_view key) const;
  // Atomic write; creates the directory if needed.
  void put(const Fixture& fixture) const;

 private:
  std::filesystem::path dir_;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const std::string& prompt, int sample_index = 0) = 0;
};

// Exact-key lookup in a fixture directory; never touches the network.
class ReplayBackend final : public CompletionBackend {
 public:
  explicit ReplayBackend(FixtureStore store) : store_(std::move(store)) {}
  // Throws Error(kFixtureMiss) naming the key.
  std::string complete(const std::string& prompt, int sample_index = 0) override;

 private:
  FixtureStore store_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws Error(kNetwork) when no response was received.
  virtual HttpResponse post(const std::string& url, const std::string& body, const Headers& headers,
                            int timeout_seconds) = 0;
};

// cpp-httplib client with TLS support.
std::unique_ptr<HttpTransport> make_http_transport();

struct LiveConfig {
  std::string endpoint;
  std::string model;
  std::string token_env = "ARCHIE_LLM_TOKEN";
  // JSON pointer to the completion text in the response body.
  std::string response_pointer = "/choices/0/message/content";
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  int timeout_seconds = 120;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

// One HTTP round trip per call; every exchange is recorded in `recorder`.
class LiveBackend final : public CompletionBackend {
 public:
  // Throws Error(kAuthMissing) when the token variable is unset or empty.
  LiveBackend(LiveConfig config, FixtureStore recorder, std::unique_ptr<HttpTransport> transport,
              const EnvLookup& env = process_env());

  // Throws Error(kNetwork) on transport failure, non-2xx status or a
  // response without text at the configured pointer.
  std::string complete(const std::string& prompt, int sample_index = 0) override;

  nlohmann::json request_body(const std::string& prompt) const;

 private:
  LiveConfig config_;
  FixtureStore recorder_;
  std::unique_ptr<HttpTransport> transport_;
  std::string token_;
};

}  // namespace archie::llm
