#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtp/providers.hpp"
#include "mtp/replanner.hpp"
#include "mtp/suite.hpp"

namespace mtp {

// ── deterministic randomness ──────────────────────────────────────────────
// Jitter streams are derived with integer mixing only, so results are
// identical across platforms and standard-library implementations.

std::uint64_t splitmix64(std::uint64_t& state);

// Stream seed for (base seed, repeat, task position in the suite).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t repeat, std::uint64_t task_index);

// Uniform draw in [0, 1) using the top 53 bits of the stream.
double uniform_unit(std::uint64_t& state);

// ── initial-state variation ───────────────────────────────────────────────

// Every repeat perturbs each object's x and y by this much at most (meters).
inline constexpr double kJitterRange = 0.03;

// The task with each scene object's x/y jittered uniformly within
// ±kJitterRange, clamped into the workspace. Objects draw in scene order
// from the (seed, repeat, task_index) stream; z never changes.
TaskSpec jittered_task(const TaskSpec& task, std::uint64_t seed, int repeat,
                       std::size_t task_index);

// ── evaluation ────────────────────────────────────────────────────────────

struct EvalConfig {
  Strategy strategy = Strategy::mtp;
  int repeats = 3;
  int max_trials = 3;
  std::uint64_t seed = 7;
  int jobs = 0;  // worker threads; 0 = one per task, capped at CPU count
  // When set, repeat r of a task with paraphrases runs paraphrase r mod n
  // instead of the canonical instruction.
  bool cycle_paraphrases = false;
  std::string adapter = "rule";  // "rule" | "llm"
};

// One episode as actually run: the jittered task plus the engine's record.
struct EpisodeRun {
  std::size_t task_index = 0;
  int repeat = 0;
  TaskSpec task;
  EpisodeResult episode;
};

struct TaskSummary {
  std::string task_id;
  std::string environment;
  int successes = 0;
  int attempts = 0;
  double percent = 0.0;
};

struct SuiteResult {
  std::string suite;
  Strategy strategy = Strategy::mtp;
  std::string adapter;
  std::string memory_label;
  std::uint64_t seed = 0;
  int repeats = 0;
  int max_trials = 0;
  std::vector<TaskSummary> tasks;        // suite order
  std::vector<double> repeat_rates;      // success fraction per repeat
  double mean_percent = 0.0;
  double std_percent = 0.0;              // population std over repeat rates
  std::string summary;                   // "66.7 ± 9.4"
  std::vector<EpisodeRun> episodes;      // task-major, repeat-minor
};

double mean_of(const std::vector<double>& xs);
double population_std(const std::vector<double>& xs);

// "83.3 ± 4.7" — one decimal, percent, population std.
std::string format_mean_std_percent(double mean_fraction, double std_fraction);

// Runs every (task, repeat) episode and aggregates success rates. Episodes
// get their own provider clone and adapter, so they may run concurrently;
// aggregation follows suite order regardless of completion order. Throws
// ValidationError on bad config; episode-level failures are recorded in the
// results, never thrown.
SuiteResult run_eval(const Suite& suite, const Memory& memory, const EvalConfig& config,
                     const CompletionProvider& provider, const EmbeddingProvider& embedder,
                     const PromptTemplate& templates);

// Stable machine-readable form: insertion-ordered keys, no timestamps, so
// identical runs serialize to identical bytes.
nlohmann::ordered_json suite_result_to_json(const SuiteResult& result);
std::string render_suite_result(const SuiteResult& result);  // dump + newline

// Aligned human-readable table: one row per task plus the mean ± std line.
std::string render_eval_table(const SuiteResult& result);

// ── episode logs and replay ───────────────────────────────────────────────

// JSON-lines trace: one "episode" line per episode (with the jittered scene)
// followed by one "trial" line per attempt (program, step trace, outcome).
void write_episode_log(std::ostream& out, const SuiteResult& result);

struct ReplayReport {
  int episodes = 0;
  int programs = 0;  // trials re-executed (those that produced a program)
  int steps = 0;     // trace entries verified
};

// Re-executes every recorded program against the suite's task definitions
// with the logged initial scene and checks each step and outcome against the
// log. Throws DriftError naming the first divergent step, ValidationError on
// malformed logs. When `trace_out` is given, prints one line per step.
ReplayReport replay_episode_log(const Suite& suite, std::istream& in,
                                std::ostream* trace_out = nullptr);

// ── memory building ───────────────────────────────────────────────────────

struct BuildReport {
  int attempted = 0;
  int succeeded = 0;
  std::vector<std::string> failed_task_ids;
  Memory memory;
};

// Runs the suite's tasks in order (repeat-0 jitter), committing each success
// to the growing memory, so later tasks can already retrieve earlier wins.
BuildReport build_memory(const Suite& suite, const EvalConfig& config,
                         const CompletionProvider& provider,
                         const EmbeddingProvider& embedder, const PromptTemplate& templates,
                         Memory seed_memory = {});

// ── ablation grids ────────────────────────────────────────────────────────

struct AblationCell {
  std::string memory_label;
  Strategy strategy = Strategy::mtp;
  double mean_percent = 0.0;
  double std_percent = 0.0;
  std::string summary;
};

struct AblationTable {
  std::string suite;
  std::uint64_t seed = 0;
  int repeats = 0;
  std::vector<AblationCell> cells;  // memory-major, strategy-minor
};

// Row labels for strategy columns in reports.
std::string display_label(Strategy s);

// retry, no_adaptation, mtp — the standard comparison set.
const std::vector<Strategy>& default_ablation_strategies();

// One run_eval per (memory, strategy) pair, same seed and repeats for all.
AblationTable run_ablation(const Suite& suite, const std::vector<Memory>& memories,
                           const std::vector<Strategy>& strategies, const EvalConfig& config,
                           const CompletionProvider& provider,
                           const EmbeddingProvider& embedder, const PromptTemplate& templates);

nlohmann::ordered_json ablation_to_json(const AblationTable& table);
std::string render_ablation_table(const AblationTable& table);

// ── inspection ────────────────────────────────────────────────────────────

// Deterministic text summary: counts, per-environment totals, then one line
// per record (index, environment, instruction, step count).
std::string describe_memory(const Memory& memory);

}  // namespace mtp
