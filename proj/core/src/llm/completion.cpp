#include "archie/llm/completion.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"

namespace archie::llm {
namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string fixture_key(std::string_view prompt, int sample_index) {
  if (sample_index <= 0) return sha256_hex(prompt);
  std::string salted(prompt);
  salted += "\n#sample=" + std::to_string(sample_index);
  return sha256_hex(salted);
}

nlohmann::json to_json(const Fixture& f) {
  return {{"key", f.key}, {"prompt", f.prompt}, {"response", f.response}, {"metadata", f.metadata}};
}

Fixture fixture_from_json(const nlohmann::json& j) {
  try {
    Fixture f;
    f.key = j.at("key").get<std::string>();
    f.prompt = j.at("prompt").get<std::string>();
    f.response = j.at("response").get<std::string>();
    if (j.contains("metadata")) f.metadata = j.at("metadata");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed fixture: ") + e.what());
  }
}

std::filesystem::path FixtureStore::path_for(std::string_view key) const {
  return dir_ / (std::string(key) + ".json");
}

std::optional<Fixture> FixtureStore::find(std::string_view key) const {
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  Fixture f = fixture_from_json(j);
  if (f.key != key) throw Error(ErrorCode::kParse, path.string() + ": key field does not match the file name");
  return f;
}

void FixtureStore::put(const Fixture& fixture) const {
  std::filesystem::create_directories(dir_);
  write_file_atomic(path_for(fixture.key), to_json(fixture).dump(2) + "\n");
}

std::string ReplayBackend::complete(const std::string& prompt, int sample_index) {
  const std::string key = fixture_key(prompt, sample_index);
  auto f = store_.find(key);
  if (!f) {
    throw Error(ErrorCode::kFixtureMiss,
                "no recorded completion for prompt hash " + key + " in " + store_.dir().string());
  }
  return f->response;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

LiveBackend::LiveBackend(LiveConfig config, FixtureStore recorder, std::unique_ptr<HttpTransport> transport,
                         const EnvLookup& env)
    : config_(std::move(config)), recorder_(std::move(recorder)), transport_(std::move(transport)) {
  const auto token = env(config_.token_env);
  if (!token || token->empty()) {
    throw Error(ErrorCode::kAuthMissing, "environment variable " + config_.token_env + " is not set");
  }
  token_ = *token;
  if (config_.endpoint.empty()) throw Error(ErrorCode::kInvalidConfig, "live backend needs an endpoint URL");
  if (config_.model.empty()) throw Error(ErrorCode::kInvalidConfig, "live backend needs a model id");
}

nlohmann::json LiveBackend::request_body(const std::string& prompt) const {
  nlohmann::json body = {
      {"model", config_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  if (config_.temperature) body["temperature"] = *config_.temperature;
  if (config_.max_tokens) body["max_tokens"] = *config_.max_tokens;
  return body;
}

std::string LiveBackend::complete(const std::string& prompt, int sample_index) {
  const Headers headers = {{"Authorization", "Bearer " + token_}, {"Content-Type", "application/json"}};
  const HttpResponse resp =
      transport_->post(config_.endpoint, request_body(prompt).dump(), headers, config_.timeout_seconds);
  if (resp.status < 200 || resp.status >= 300) {
    throw Error(ErrorCode::kNetwork, "completion endpoint returned HTTP " + std::to_string(resp.status));
  }
  std::string text;
  try {
    const auto j = nlohmann::json::parse(resp.body);
    text = j.at(nlohmann::json::json_pointer(config_.response_pointer)).get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kNetwork, "completion response has no text at " + config_.response_pointer + ": " +
                                         e.what());
  }
  Fixture f;
  f.key = fixture_key(prompt, sample_index);
  f.prompt = prompt;
  f.response = text;
  f.metadata = {{"model", config_.model},
                {"endpoint", config_.endpoint},
                {"sample_index", sample_index},
                {"timestamp", utc_timestamp()}};
  if (config_.temperature) f.metadata["temperature"] = *config_.temperature;
  recorder_.put(f);
  return text;
}

}  // namespace archie::llm
