#include "mtp/replanner.hpp"

#include "mtp/errors.hpp"

namespace mtp {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::single_shot: return "single_shot";
    case Strategy::retry: return "retry";
    case Strategy::no_adaptation: return "no_adaptation";
    case Strategy::mtp: return "mtp";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& text) {
  if (text == "single_shot") return Strategy::single_shot;
  if (text == "retry") return Strategy::retry;
  if (text == "no_adaptation") return Strategy::no_adaptation;
  if (text == "mtp") return Strategy::mtp;
  throw ValidationError("unknown strategy: " + text +
                        " (expected single_shot, retry, no_adaptation or mtp)");
}

const EnvironmentProfile* EnvironmentRegistry::find(const std::string& name) const {
  auto it = profiles.find(name);
  return it == profiles.end() ? nullptr : &it->second;
}

EnvironmentProfile EnvironmentRegistry::resolve(const std::string& name) const {
  if (const EnvironmentProfile* profile = find(name)) return *profile;
  EnvironmentProfile neutral;
  neutral.name = name;
  return neutral;
}

namespace {

// The most recent attempt that produced a program, rendered canonically;
// empty when every earlier attempt failed before producing one.
std::string latest_failed_code(const std::vector<TrialRecord>& trials) {
  for (auto it = trials.rbegin(); it != trials.rend(); ++it) {
    if (it->program) return render_program(*it->program);
  }
  return "";
}

}  // namespace

EpisodeResult run_episode(const TaskSpec& task, const Memory& memory,
                          const ReplannerConfig& config, CompletionProvider& provider,
                          const EmbeddingProvider& embedder, MemoryAdapter& adapter,
                          const PromptTemplate& templates, const EnvironmentRegistry& registry,
                          const std::vector<std::string>& prompt_examples) {
  EpisodeResult episode;
  episode.task_id = task.id;
  episode.instruction = task.instruction;
  episode.environment = task.environment.name;
  episode.strategy = config.strategy;

  const bool uses_memory =
      config.strategy == Strategy::mtp || config.strategy == Strategy::no_adaptation;
  // One ranking per episode: later trials walk down it instead of re-ranking.
  RetrievalRanking ranking;
  if (uses_memory && !memory.logs.empty()) {
    ranking = rank_memory(task.instruction, memory, embedder);
  }

  const int budget = config.strategy == Strategy::single_shot ? 1 : std::max(1, config.max_trials);
  const std::vector<std::string> scene = task.object_names();

  for (int index = 0; index < budget && !episode.success; ++index) {
    TrialRecord trial;
    trial.index = index;

    // ── choose the prompt ────────────────────────────────────────────────
    try {
      bool replanning = false;
      if (index > 0 && uses_memory) {
        const std::size_t rank = static_cast<std::size_t>(index - 1);
        if (rank < ranking.size()) {
          const SuccessLog& recalled = retrieve_ith(ranking, memory, rank);
          trial.retrieved_rank = rank;
          trial.retrieved_instruction = recalled.instruction;
          if (config.strategy == Strategy::mtp) {
            AdaptationResult adapted =
                adapter.adapt(recalled, registry.resolve(recalled.environment), task.environment,
                              task.instruction, scene);
            trial.adapted_code = adapted.code;
            trial.adapted = true;
          } else {
            trial.adapted_code = recalled.code;  // shown verbatim, no rewrite
          }
          const std::string failed_code = latest_failed_code(episode.trials);
          if (!failed_code.empty()) {
            trial.prompt = build_replan_prompt(templates, prompt_examples, task.instruction,
                                               *trial.adapted_code, failed_code);
            replanning = true;
          }
        }
      }
      if (!replanning) {
        // first attempt, memory exhausted, or nothing failed with a program
        // yet: plain generation
        trial.prompt = build_generation_prompt(templates, prompt_examples, task.instruction, scene);
      }
    } catch (const Error& e) {
      trial.failure_reason = std::string("trial setup failed: ") + e.what();
      episode.trials.push_back(std::move(trial));
      continue;
    }

    // ── ask the provider ─────────────────────────────────────────────────
    try {
      trial.completion = provider.complete(trial.prompt);
    } catch (const ProviderError& e) {
      trial.failure_reason = std::string("provider error: ") + e.what();
      episode.trials.push_back(std::move(trial));
      continue;
    }

    // ── extract and run the program ──────────────────────────────────────
    try {
      trial.program_text = extract_program(trial.completion);
      trial.program = parse_program(*trial.program_text);
    } catch (const Error&) {
      trial.failure_reason = "no program in completion";
      episode.trials.push_back(std::move(trial));
      continue;
    }

    const ExecutionResult run = execute_program(*trial.program, task);
    trial.trace = run.trace;
    trial.success = run.success;
    if (!run.success) trial.failure_reason = run.failure_reason;

    if (trial.success) {
      episode.success = true;
      episode.success_trial = index;
      episode.final_program = trial.program;
    }
    episode.trials.push_back(std::move(trial));
  }

  return episode;
}

void commit_success(Memory& memory, const TaskSpec& task, const EpisodeResult& episode) {
  if (!episode.success || !episode.final_program) throw NotSuccessfulError();
  SuccessLog log;
  log.environment = task.environment.name;
  log.instruction = task.instruction;
  log.code = render_program(*episode.final_program);
  append_log(memory, log);
}

}  // namespace mtp
