#include "mtp/providers.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mtp/errors.hpp"

namespace mtp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// Shared POST-with-retries plumbing for both remote providers. Retries cover
// transport failures and 5xx responses only; 4xx means the request itself is
// wrong and a retry would just repeat it.
struct RequestSpec {
  std::string endpoint;
  std::string path;
  std::string body;
  double timeout_seconds = 30.0;
  std::string auth_env_var;
  int max_attempts = 1;  // total requests allowed
  double backoff_base_seconds = 1.0;
  double backoff_factor = 2.0;
};

nlohmann::json post_json(const RequestSpec& spec) {
  httplib::Headers headers;
  if (!spec.auth_env_var.empty()) {
    // The token itself never appears in errors or logs, only the header.
    if (const char* token = std::getenv(spec.auth_env_var.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  const int attempts_allowed = std::max(1, spec.max_attempts);
  for (int attempt = 1;; ++attempt) {
    httplib::Client client(spec.endpoint);
    const auto timeout =
        std::chrono::milliseconds(static_cast<long long>(spec.timeout_seconds * 1000.0));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    auto res = client.Post(spec.path, headers, spec.body, "application/json");
    if (res) {
      const int status = res->status;
      if (status >= 200 && status < 300) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
          throw MalformedResponseError(std::string("response is not JSON: ") + e.what(), attempt);
        }
      }
      if (status < 500) throw HttpStatusError(status, attempt);
      if (attempt >= attempts_allowed) throw HttpStatusError(status, attempt);
    } else {
      if (attempt >= attempts_allowed) {
        if (res.error() == httplib::Error::ConnectionTimeout) {
          throw TimeoutError("request timed out", attempt);
        }
        throw TransportError("transport failure: " + httplib::to_string(res.error()), attempt);
      }
    }

    const double sleep_seconds =
        spec.backoff_base_seconds * std::pow(spec.backoff_factor, attempt - 1);
    std::this_thread::sleep_for(std::chrono::duration<double>(sleep_seconds));
  }
}

}  // namespace

// ── scripted provider ─────────────────────────────────────────────────────

ScriptedProvider::ScriptedProvider(bool strict, std::vector<ScriptedEntry> entries)
    : strict_(strict), entries_(std::move(entries)), used_(entries_.size(), false) {}

ScriptedProvider ScriptedProvider::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("script is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("script root must be an object");
  if (doc.contains("strict") && !doc["strict"].is_boolean())
    throw ValidationError("script field 'strict' must be a boolean");
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw ValidationError("script needs an 'entries' array");

  std::vector<ScriptedEntry> entries;
  for (std::size_t i = 0; i < doc["entries"].size(); ++i) {
    const auto& item = doc["entries"][i];
    const std::string where = "entry " + std::to_string(i);
    if (!item.is_object() || !item.contains("match") || !item.contains("response"))
      throw ValidationError(where + " needs 'match' and 'response'");
    if (!item["response"].is_string()) throw ValidationError(where + ": 'response' must be a string");

    ScriptedEntry entry;
    entry.response = item["response"].get<std::string>();
    if (item["match"].is_string()) {
      entry.match.push_back(item["match"].get<std::string>());
    } else if (item["match"].is_array()) {
      for (const auto& m : item["match"]) {
        if (!m.is_string()) throw ValidationError(where + ": 'match' items must be strings");
        entry.match.push_back(m.get<std::string>());
      }
    } else {
      throw ValidationError(where + ": 'match' must be a string or an array of strings");
    }
    if (entry.match.empty()) throw ValidationError(where + ": 'match' must not be empty");
    entries.push_back(std::move(entry));
  }
  return ScriptedProvider(doc.value("strict", true), std::move(entries));
}

ScriptedProvider ScriptedProvider::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read script file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string ScriptedProvider::complete(const std::string& prompt) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (used_[i]) continue;
    const auto& entry = entries_[i];
    const bool matches = std::all_of(entry.match.begin(), entry.match.end(),
                                     [&](const std::string& m) {
                                       return prompt.find(m) != std::string::npos;
                                     });
    if (matches) {
      used_[i] = true;
      return entry.response;
    }
  }
  if (strict_) {
    throw UnmatchedPromptError("no scripted entry matches prompt starting: " +
                               prompt.substr(0, 120));
  }
  return "";
}

std::unique_ptr<CompletionProvider> ScriptedProvider::clone() const {
  return std::make_unique<ScriptedProvider>(strict_, entries_);
}

void ScriptedProvider::reset() { used_.assign(entries_.size(), false); }

std::size_t ScriptedProvider::consumed_count() const {
  return static_cast<std::size_t>(std::count(used_.begin(), used_.end(), true));
}

// ── http provider ─────────────────────────────────────────────────────────

HttpCompletionProvider::HttpCompletionProvider(HttpProviderConfig config)
    : config_(std::move(config)) {}

std::string HttpCompletionProvider::complete(const std::string& prompt) {
  const nlohmann::json payload = {
      {"model", config_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", 0},
  };

  RequestSpec spec;
  spec.endpoint = config_.endpoint;
  spec.path = "/chat/completions";
  spec.body = payload.dump();
  spec.timeout_seconds = config_.timeout_seconds;
  spec.auth_env_var = config_.auth_env_var;
  spec.max_attempts = config_.max_retries;
  spec.backoff_base_seconds = config_.backoff_base_seconds;
  spec.backoff_factor = config_.backoff_factor;

  const nlohmann::json body = post_json(spec);
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("completion shape unexpected: ") + e.what());
  }
}

std::unique_ptr<CompletionProvider> HttpCompletionProvider::clone() const {
  return std::make_unique<HttpCompletionProvider>(config_);
}

// ── remote embedder ───────────────────────────────────────────────────────

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig config)
    : config_(std::move(config)) {}

EmbeddingVector RemoteEmbeddingProvider::embed(const std::string& text) const {
  if (trim(text).empty()) throw EmptyTextError();

  const nlohmann::json payload = {{"input", text}, {"model", config_.model}};
  RequestSpec spec;
  spec.endpoint = config_.endpoint;
  spec.path = "/embeddings";
  spec.body = payload.dump();
  spec.timeout_seconds = config_.timeout_seconds;
  spec.auth_env_var = config_.auth_env_var;
  spec.max_attempts = 2;  // one retry at most
  spec.backoff_base_seconds = 0.2;
  spec.backoff_factor = 1.0;

  const nlohmann::json body = post_json(spec);
  EmbeddingVector vec;
  try {
    vec.values = body.at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("embedding shape unexpected: ") + e.what());
  }
  if (vec.values.empty()) throw MalformedResponseError("embedding is empty");

  const double n = vec.norm();
  if (n > 0.0) {
    for (double& v : vec.values) v /= n;
  }
  return vec;
}

}  // namespace mtp
