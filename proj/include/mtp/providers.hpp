#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mtp/embedding.hpp"

namespace mtp {

// A completion backend: prompt text in, completion text out. Implementations
// throw the ProviderError family on failure.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string name() const = 0;
  virtual std::string complete(const std::string& prompt) = 0;
  // A pristine copy: same script/config, no consumed state. Episodes each get
  // their own clone so one episode's consumption never leaks into another.
  virtual std::unique_ptr<CompletionProvider> clone() const = 0;
};

// ── scripted provider ─────────────────────────────────────────────────────

// One canned response, returned for the first prompt that contains every
// match substring. Entries are single-use and scanned in file order.
struct ScriptedEntry {
  std::vector<std::string> match;
  std::string response;
};

// Deterministic stand-in for a live model, driven by a JSON script:
//   {"strict": true, "entries": [{"match": "...", "response": "..."}, ...]}
// "match" is one substring or an array of substrings that must all appear.
// Strict scripts throw UnmatchedPromptError on an unmatched prompt; lax
// scripts return an empty completion instead.
class ScriptedProvider final : public CompletionProvider {
 public:
  ScriptedProvider() = default;
  ScriptedProvider(bool strict, std::vector<ScriptedEntry> entries);

  static ScriptedProvider from_json_text(const std::string& text);
  static ScriptedProvider load(const std::string& path);

  std::string name() const override { return "scripted"; }
  std::string complete(const std::string& prompt) override;
  std::unique_ptr<CompletionProvider> clone() const override;

  void reset();  // mark every entry unused again
  bool strict() const { return strict_; }
  std::size_t entry_count() const { return entries_.size(); }
  std::size_t consumed_count() const;

 private:
  bool strict_ = false;
  std::vector<ScriptedEntry> entries_;
  std::vector<bool> used_;
};

// ── http provider ─────────────────────────────────────────────────────────

struct HttpProviderConfig {
  std::string endpoint;  // "http://host:port"
  std::string model = "planner";
  int max_retries = 3;                // total attempts, including the first
  double backoff_base_seconds = 1.0;  // sleep before attempt n+1 ...
  double backoff_factor = 2.0;        // ... is base * factor^(n-1)
  double timeout_seconds = 30.0;
  std::string auth_env_var;  // env var holding a bearer token; empty = none
};

// Chat-completion client: POST {endpoint}/chat/completions with the prompt as
// a single user message at temperature 0; the completion is
// choices[0].message.content. Transport failures and 5xx responses are
// retried with exponential backoff; 4xx and malformed bodies are not.
class HttpCompletionProvider final : public CompletionProvider {
 public:
  explicit HttpCompletionProvider(HttpProviderConfig config);

  std::string name() const override { return "http"; }
  std::string complete(const std::string& prompt) override;
  std::unique_ptr<CompletionProvider> clone() const override;

  const HttpProviderConfig& config() const { return config_; }

 private:
  HttpProviderConfig config_;
};

// ── remote embedder ───────────────────────────────────────────────────────

struct RemoteEmbeddingConfig {
  std::string endpoint;  // "http://host:port"
  std::string model = "embedder";
  double timeout_seconds = 30.0;
  std::string auth_env_var;
};

// POST {endpoint}/embeddings with {"input": text, "model": ...}; expects
// {"embedding": [numbers]}. Vectors are L2-normalized on receipt so cosine
// scores stay comparable with the offline embedder. Retries at most once.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig config);

  std::string name() const override { return "remote-embedding"; }
  std::size_t dimension() const override { return 0; }  // set by the server
  EmbeddingVector embed(const std::string& text) const override;

 private:
  RemoteEmbeddingConfig config_;
};

}  // namespace mtp
