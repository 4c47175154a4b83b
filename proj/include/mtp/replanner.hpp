#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtp/adaptation.hpp"
#include "mtp/composer_dsl.hpp"
#include "mtp/memory_store.hpp"
#include "mtp/prompts.hpp"
#include "mtp/providers.hpp"
#include "mtp/retrieval.hpp"
#include "mtp/world_sim.hpp"

namespace mtp {

// How an episode spends its trial budget after the first attempt fails:
//  single_shot    one generation attempt, no recovery
//  retry          regenerate from the same generation prompt
//  no_adaptation  recall similar stored programs but show them verbatim
//  mtp            recall similar stored programs, adapt them to the scene,
//                 then re-plan with the failed attempt in context
enum class Strategy { single_shot, retry, no_adaptation, mtp };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& text);  // throws ValidationError

struct ReplannerConfig {
  Strategy strategy = Strategy::mtp;
  int max_trials = 3;  // total attempts per episode, including the first
};

// Known environments, for resolving the profile a stored program came from.
struct EnvironmentRegistry {
  std::map<std::string, EnvironmentProfile> profiles;

  void add(const EnvironmentProfile& profile) { profiles[profile.name] = profile; }
  const EnvironmentProfile* find(const std::string& name) const;
  // The registered profile, or a neutral profile carrying just the name so
  // programs from unknown environments adapt with no unit or pose conventions.
  EnvironmentProfile resolve(const std::string& name) const;
};

// Everything one attempt did, kept for logs, replay and debugging.
struct TrialRecord {
  int index = 0;
  std::string prompt;
  std::string completion;
  std::optional<std::string> program_text;      // extracted program, when found
  std::optional<PlannerProgram> program;        // its parse
  std::optional<std::size_t> retrieved_rank;    // which ranked memory fed this trial
  std::optional<std::string> retrieved_instruction;
  std::optional<std::string> adapted_code;      // reference program shown when re-planning
  bool adapted = false;                         // true when an adapter rewrote it
  bool success = false;
  std::optional<std::string> failure_reason;
  std::vector<TraceEntry> trace;
};

struct EpisodeResult {
  std::string task_id;
  std::string instruction;
  std::string environment;
  Strategy strategy = Strategy::mtp;
  bool success = false;
  std::optional<int> success_trial;
  std::vector<TrialRecord> trials;
  std::optional<PlannerProgram> final_program;

  int trials_used() const { return static_cast<int>(trials.size()); }
};

// Runs one task episode: generate, execute, and on failure recover per the
// strategy until the trial budget runs out. The similarity ranking over
// `memory` is computed once up front; trial k>0 of a memory strategy uses the
// (k-1)-th most similar entry and falls back to plain retry semantics once
// the ranking is exhausted. Provider, extraction and adaptation failures
// consume a trial and are recorded, never thrown. `memory` is read-only here;
// call commit_success to store the outcome.
EpisodeResult run_episode(const TaskSpec& task, const Memory& memory,
                          const ReplannerConfig& config, CompletionProvider& provider,
                          const EmbeddingProvider& embedder, MemoryAdapter& adapter,
                          const PromptTemplate& templates, const EnvironmentRegistry& registry,
                          const std::vector<std::string>& prompt_examples = {});

// Appends the winning program to `memory` (canonically rendered). Throws
// NotSuccessfulError when the episode did not succeed.
void commit_success(Memory& memory, const TaskSpec& task, const EpisodeResult& episode);

}  // namespace mtp
