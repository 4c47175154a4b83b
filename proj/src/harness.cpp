#include "mtp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "mtp/adaptation.hpp"
#include "mtp/errors.hpp"

namespace mtp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

std::string pad_right(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

std::string pad_left(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

std::unique_ptr<MemoryAdapter> make_adapter(const std::string& kind,
                                            CompletionProvider& provider,
                                            const PromptTemplate& templates) {
  if (kind == "rule") return std::make_unique<RuleBasedAdapter>();
  if (kind == "llm") return std::make_unique<LlmAdapter>(provider, templates);
  throw ValidationError("unknown adapter \"" + kind + "\" (expected \"rule\" or \"llm\")");
}

void check_eval_config(const EvalConfig& config) {
  if (config.repeats <= 0) throw ValidationError("repeats must be positive");
  if (config.max_trials <= 0) throw ValidationError("max trials must be positive");
  if (config.jobs < 0) throw ValidationError("jobs must be non-negative");
  if (config.adapter != "rule" && config.adapter != "llm")
    throw ValidationError("unknown adapter \"" + config.adapter + "\" (expected \"rule\" or \"llm\")");
}

// Runs body(0..count-1) on a small worker pool; rethrows the first failure.
// Worker count defaults to one thread per item, capped at the CPU count.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t width;
  if (jobs > 0) {
    width = static_cast<std::size_t>(jobs);
  } else {
    unsigned hardware = std::thread::hardware_concurrency();
    width = std::min<std::size_t>(count, hardware == 0 ? 1 : hardware);
  }
  width = std::min(width, count);
  if (width <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> workers;
  workers.reserve(width);
  for (std::size_t w = 0; w < width; ++w) workers.emplace_back(worker);
  for (auto& thread : workers) thread.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string memory_label_of(const Memory& memory) {
  if (!memory.source_label.empty()) return memory.source_label;
  return memory.empty() ? "(none)" : "(unlabeled)";
}

ordered_json vec3_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

ordered_json scene_json(const std::vector<SceneObject>& scene) {
  ordered_json out = ordered_json::array();
  for (const auto& object : scene) {
    ordered_json entry;
    entry["name"] = object.name;
    entry["position"] = vec3_json(object.position);
    entry["graspable"] = object.graspable;
    if (object.container_radius)
      entry["container_radius"] = *object.container_radius;
    else
      entry["container_radius"] = nullptr;
    entry["yaw"] = object.yaw;
    out.push_back(std::move(entry));
  }
  return out;
}

ordered_json trace_json(const std::vector<TraceEntry>& trace) {
  ordered_json out = ordered_json::array();
  for (const auto& entry : trace) {
    ordered_json line;
    line["command"] = entry.command;
    line["outcome"] = to_string(entry.outcome);
    line["gripper"] = vec3_json(entry.gripper_position);
    if (entry.holding)
      line["holding"] = *entry.holding;
    else
      line["holding"] = nullptr;
    out.push_back(std::move(line));
  }
  return out;
}

Vec3 parse_vec3_log(const json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 3) throw ValidationError(where + ": expected [x, y, z]");
  for (const auto& c : node)
    if (!c.is_number()) throw ValidationError(where + ": coordinates must be numbers");
  return Vec3{node[0].get<double>(), node[1].get<double>(), node[2].get<double>()};
}

std::vector<SceneObject> parse_scene_log(const json& node, const std::string& where) {
  if (!node.is_array() || node.empty())
    throw ValidationError(where + ": \"scene\" must be a non-empty array");
  std::vector<SceneObject> scene;
  for (const auto& item : node) {
    if (!item.is_object()) throw ValidationError(where + ": scene entries must be objects");
    SceneObject object;
    object.name = item.at("name").get<std::string>();
    object.position = parse_vec3_log(item.at("position"), where + " object \"" + object.name + "\"");
    if (item.contains("graspable")) object.graspable = item["graspable"].get<bool>();
    if (item.contains("container_radius") && !item["container_radius"].is_null())
      object.container_radius = item["container_radius"].get<double>();
    if (item.contains("yaw")) object.yaw = item["yaw"].get<double>();
    scene.push_back(std::move(object));
  }
  return scene;
}

}  // namespace

// ── deterministic randomness ──────────────────────────────────────────────

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t repeat, std::uint64_t task_index) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= (repeat + 1) * 0xbf58476d1ce4e5b9ull;
  const std::uint64_t b = splitmix64(state);
  state ^= (task_index + 1) * 0x94d049bb133111ebull;
  return splitmix64(state) ^ a ^ b;
}

double uniform_unit(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * (1.0 / 9007199254740992.0);
}

// ── initial-state variation ───────────────────────────────────────────────

TaskSpec jittered_task(const TaskSpec& task, std::uint64_t seed, int repeat,
                       std::size_t task_index) {
  TaskSpec jittered = task;
  std::uint64_t stream = mix_seed(seed, static_cast<std::uint64_t>(repeat), task_index);
  const Box& bounds = task.environment.workspace_bounds;
  for (auto& object : jittered.initial_scene) {
    const double dx = (uniform_unit(stream) * 2.0 - 1.0) * kJitterRange;
    const double dy = (uniform_unit(stream) * 2.0 - 1.0) * kJitterRange;
    object.position.x = std::clamp(object.position.x + dx, bounds.min.x, bounds.max.x);
    object.position.y = std::clamp(object.position.y + dy, bounds.min.y, bounds.max.y);
  }
  return jittered;
}

// ── statistics ────────────────────────────────────────────────────────────

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double population_std(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double mean = mean_of(xs);
  double sum_sq = 0.0;
  for (double x : xs) sum_sq += (x - mean) * (x - mean);
  return std::sqrt(sum_sq / static_cast<double>(xs.size()));
}

std::string format_mean_std_percent(double mean_fraction, double std_fraction) {
  return format_fixed(mean_fraction * 100.0, 1) + " ± " + format_fixed(std_fraction * 100.0, 1);
}

// ── evaluation ────────────────────────────────────────────────────────────

SuiteResult run_eval(const Suite& suite, const Memory& memory, const EvalConfig& config,
                     const CompletionProvider& provider, const EmbeddingProvider& embedder,
                     const PromptTemplate& templates) {
  check_eval_config(config);
  const std::size_t task_count = suite.tasks.size();
  const std::size_t repeats = static_cast<std::size_t>(config.repeats);
  const std::size_t episode_count = task_count * repeats;

  std::vector<EpisodeRun> runs(episode_count);
  parallel_for(episode_count, config.jobs, [&](std::size_t e) {
    const std::size_t task_index = e / repeats;
    const int repeat = static_cast<int>(e % repeats);
    TaskSpec task = jittered_task(suite.tasks[task_index], config.seed, repeat, task_index);
    if (config.cycle_paraphrases && !task.paraphrases.empty())
      task.instruction = task.paraphrases[static_cast<std::size_t>(repeat) % task.paraphrases.size()];
    auto episode_provider = provider.clone();
    auto adapter = make_adapter(config.adapter, *episode_provider, templates);
    ReplannerConfig replanner_config;
    replanner_config.strategy = config.strategy;
    replanner_config.max_trials = config.max_trials;
    EpisodeResult episode =
        run_episode(task, memory, replanner_config, *episode_provider, embedder, *adapter,
                    templates, suite.environments, suite.examples_for(task.environment.name));
    runs[e] = EpisodeRun{task_index, repeat, std::move(task), std::move(episode)};
  });

  SuiteResult result;
  result.suite = suite.name;
  result.strategy = config.strategy;
  result.adapter = config.adapter;
  result.memory_label = memory_label_of(memory);
  result.seed = config.seed;
  result.repeats = config.repeats;
  result.max_trials = config.max_trials;
  result.episodes = std::move(runs);

  std::vector<int> repeat_successes(repeats, 0);
  for (std::size_t task_index = 0; task_index < task_count; ++task_index) {
    TaskSummary summary;
    summary.task_id = suite.tasks[task_index].id;
    summary.environment = suite.tasks[task_index].environment.name;
    summary.attempts = config.repeats;
    for (std::size_t r = 0; r < repeats; ++r) {
      const EpisodeRun& run = result.episodes[task_index * repeats + r];
      if (run.episode.success) {
        ++summary.successes;
        ++repeat_successes[r];
      }
    }
    summary.percent = 100.0 * summary.successes / static_cast<double>(summary.attempts);
    result.tasks.push_back(std::move(summary));
  }
  result.repeat_rates.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r)
    result.repeat_rates.push_back(repeat_successes[r] / static_cast<double>(task_count));
  const double mean_fraction = mean_of(result.repeat_rates);
  const double std_fraction = population_std(result.repeat_rates);
  result.mean_percent = mean_fraction * 100.0;
  result.std_percent = std_fraction * 100.0;
  result.summary = format_mean_std_percent(mean_fraction, std_fraction);
  return result;
}

nlohmann::ordered_json suite_result_to_json(const SuiteResult& result) {
  ordered_json out;
  out["suite"] = result.suite;
  out["strategy"] = to_string(result.strategy);
  out["adapter"] = result.adapter;
  out["memory"] = result.memory_label;
  out["seed"] = result.seed;
  out["repeats"] = result.repeats;
  out["max_trials"] = result.max_trials;
  ordered_json seeds = ordered_json::array();
  for (int r = 0; r < result.repeats; ++r)
    seeds.push_back(result.seed + static_cast<std::uint64_t>(r));
  out["seeds"] = std::move(seeds);
  ordered_json tasks = ordered_json::array();
  for (const auto& task : result.tasks) {
    ordered_json row;
    row["id"] = task.task_id;
    row["environment"] = task.environment;
    row["successes"] = task.successes;
    row["attempts"] = task.attempts;
    row["percent"] = task.percent;
    tasks.push_back(std::move(row));
  }
  out["tasks"] = std::move(tasks);
  out["repeat_rates"] = result.repeat_rates;
  out["mean_percent"] = result.mean_percent;
  out["std_percent"] = result.std_percent;
  out["summary"] = result.summary;
  return out;
}

std::string render_suite_result(const SuiteResult& result) {
  return suite_result_to_json(result).dump(2) + "\n";
}

std::string render_eval_table(const SuiteResult& result) {
  std::size_t task_width = std::string("task").size();
  std::size_t env_width = std::string("environment").size();
  for (const auto& task : result.tasks) {
    task_width = std::max(task_width, task.task_id.size());
    env_width = std::max(env_width, task.environment.size());
  }
  const std::string strategy_header = display_label(result.strategy);
  const std::size_t rate_width = std::max<std::size_t>(strategy_header.size(), 10);

  std::ostringstream out;
  out << "suite: " << result.suite << "   strategy: " << strategy_header
      << "   adapter: " << result.adapter << "   memory: " << result.memory_label
      << "   seed: " << result.seed << "   repeats: " << result.repeats << "\n";
  out << pad_right("task", task_width) << "  " << pad_right("environment", env_width) << "  "
      << pad_left(strategy_header, rate_width) << "\n";
  for (const auto& task : result.tasks) {
    const std::string rate = std::to_string(task.successes) + "/" +
                             std::to_string(task.attempts) + " (" +
                             format_fixed(task.percent, 1) + ")";
    out << pad_right(task.task_id, task_width) << "  " << pad_right(task.environment, env_width)
        << "  " << pad_left(rate, rate_width) << "\n";
  }
  out << "mean ± std over " << result.repeats << " repeats: " << result.summary << "\n";
  return out.str();
}

// ── episode logs and replay ───────────────────────────────────────────────

void write_episode_log(std::ostream& out, const SuiteResult& result) {
  for (const auto& run : result.episodes) {
    const EpisodeResult& episode = run.episode;
    ordered_json header;
    header["kind"] = "episode";
    header["task"] = episode.task_id;
    header["repeat"] = run.repeat;
    header["environment"] = episode.environment;
    header["instruction"] = episode.instruction;
    header["strategy"] = to_string(episode.strategy);
    header["success"] = episode.success;
    if (episode.success_trial)
      header["success_trial"] = *episode.success_trial;
    else
      header["success_trial"] = nullptr;
    header["scene"] = scene_json(run.task.initial_scene);
    out << header.dump() << "\n";
    for (const auto& trial : episode.trials) {
      ordered_json line;
      line["kind"] = "trial";
      line["task"] = episode.task_id;
      line["repeat"] = run.repeat;
      line["index"] = trial.index;
      line["success"] = trial.success;
      if (trial.failure_reason)
        line["failure_reason"] = *trial.failure_reason;
      else
        line["failure_reason"] = nullptr;
      if (trial.retrieved_rank)
        line["retrieved_rank"] = *trial.retrieved_rank;
      else
        line["retrieved_rank"] = nullptr;
      if (trial.retrieved_instruction)
        line["retrieved_instruction"] = *trial.retrieved_instruction;
      else
        line["retrieved_instruction"] = nullptr;
      line["adapted"] = trial.adapted;
      if (trial.adapted_code)
        line["adapted_code"] = *trial.adapted_code;
      else
        line["adapted_code"] = nullptr;
      if (trial.program_text)
        line["program"] = *trial.program_text;
      else
        line["program"] = nullptr;
      line["trace"] = trace_json(trial.trace);
      out << line.dump() << "\n";
    }
  }
}

namespace {

struct ReplayContext {
  bool active = false;
  std::string task_id;
  int repeat = 0;
  TaskSpec task;  // suite definition with the logged scene substituted
};

std::string describe_vec(const Vec3& v) {
  return "(" + format_fixed(v.x, 3) + ", " + format_fixed(v.y, 3) + ", " + format_fixed(v.z, 3) +
         ")";
}

void verify_trial(const ReplayContext& context, const json& line, std::ostream* trace_out,
                  ReplayReport& report) {
  const std::string label =
      context.task_id + "#" + std::to_string(context.repeat) + " trial " +
      std::to_string(line.at("index").get<int>());
  const bool logged_success = line.at("success").get<bool>();
  if (line.at("program").is_null()) {
    if (logged_success)
      throw ValidationError(label + ": marked successful but carries no program");
    return;  // nothing ran; nothing to re-execute
  }
  PlannerProgram program = parse_program(line.at("program").get<std::string>());
  ExecutionResult rerun = execute_program(program, context.task);
  ++report.programs;

  const json& logged_trace = line.at("trace");
  const std::size_t common = std::min<std::size_t>(logged_trace.size(), rerun.trace.size());
  for (std::size_t i = 0; i < common; ++i) {
    const json& want = logged_trace[i];
    const TraceEntry& got = rerun.trace[i];
    if (want.at("command").get<std::string>() != got.command)
      throw DriftError(i, label + " step " + std::to_string(i) + ": command diverged (log \"" +
                              want.at("command").get<std::string>() + "\", replay \"" +
                              got.command + "\")");
    if (want.at("outcome").get<std::string>() != std::string(to_string(got.outcome)))
      throw DriftError(i, label + " step " + std::to_string(i) + ": outcome diverged (log " +
                              want.at("outcome").get<std::string>() + ", replay " +
                              to_string(got.outcome) + ")");
    const Vec3 want_gripper = parse_vec3_log(want.at("gripper"), label + " gripper");
    if (!(want_gripper == got.gripper_position))
      throw DriftError(i, label + " step " + std::to_string(i) + ": gripper diverged (log " +
                              describe_vec(want_gripper) + ", replay " +
                              describe_vec(got.gripper_position) + ")");
    const bool want_holding = !want.at("holding").is_null();
    if (want_holding != got.holding.has_value() ||
        (want_holding && want.at("holding").get<std::string>() != *got.holding))
      throw DriftError(i, label + " step " + std::to_string(i) + ": held object diverged");
    if (trace_out) {
      *trace_out << label << " step " << i << " [" << to_string(got.outcome) << "] "
                 << got.command << " -> gripper " << describe_vec(got.gripper_position)
                 << (got.holding ? " holding " + *got.holding : std::string()) << "\n";
    }
    ++report.steps;
  }
  if (logged_trace.size() != rerun.trace.size())
    throw DriftError(common, label + ": trace length diverged (log " +
                                 std::to_string(logged_trace.size()) + " steps, replay " +
                                 std::to_string(rerun.trace.size()) + ")");
  if (logged_success != rerun.success)
    throw DriftError(rerun.trace.size(),
                     label + ": outcome flag diverged (log " +
                         (logged_success ? "success" : "failure") + ", replay " +
                         (rerun.success ? "success" : "failure") + ")");
}

}  // namespace

ReplayReport replay_episode_log(const Suite& suite, std::istream& in, std::ostream* trace_out) {
  ReplayReport report;
  ReplayContext context;
  std::string line_text;
  std::size_t line_number = 0;
  while (std::getline(in, line_text)) {
    ++line_number;
    if (line_text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "episode log line " + std::to_string(line_number);
    json line = json::parse(line_text, nullptr, false);
    if (line.is_discarded()) throw ValidationError(where + ": not valid JSON");
    if (!line.is_object() || !line.contains("kind"))
      throw ValidationError(where + ": expected an object with a \"kind\"");
    const std::string kind = line["kind"].get<std::string>();
    if (kind == "episode") {
      const std::string task_id = line.at("task").get<std::string>();
      const TaskSpec* definition = nullptr;
      for (const auto& task : suite.tasks)
        if (task.id == task_id) definition = &task;
      if (definition == nullptr)
        throw ValidationError(where + ": suite has no task \"" + task_id + "\"");
      context.active = true;
      context.task_id = task_id;
      context.repeat = line.at("repeat").get<int>();
      context.task = *definition;
      context.task.instruction = line.at("instruction").get<std::string>();
      context.task.initial_scene = parse_scene_log(line.at("scene"), where);
      ++report.episodes;
    } else if (kind == "trial") {
      if (!context.active)
        throw ValidationError(where + ": trial line before any episode line");
      verify_trial(context, line, trace_out, report);
    } else {
      throw ValidationError(where + ": unknown kind \"" + kind + "\"");
    }
  }
  return report;
}

// ── memory building ───────────────────────────────────────────────────────

BuildReport build_memory(const Suite& suite, const EvalConfig& config,
                         const CompletionProvider& provider, const EmbeddingProvider& embedder,
                         const PromptTemplate& templates, Memory seed_memory) {
  check_eval_config(config);
  BuildReport report;
  report.memory = std::move(seed_memory);
  for (std::size_t task_index = 0; task_index < suite.tasks.size(); ++task_index) {
    TaskSpec task = jittered_task(suite.tasks[task_index], config.seed, 0, task_index);
    auto episode_provider = provider.clone();
    auto adapter = make_adapter(config.adapter, *episode_provider, templates);
    ReplannerConfig replanner_config;
    replanner_config.strategy = config.strategy;
    replanner_config.max_trials = config.max_trials;
    EpisodeResult episode =
        run_episode(task, report.memory, replanner_config, *episode_provider, embedder, *adapter,
                    templates, suite.environments, suite.examples_for(task.environment.name));
    ++report.attempted;
    if (episode.success) {
      commit_success(report.memory, task, episode);
      ++report.succeeded;
    } else {
      report.failed_task_ids.push_back(task.id);
    }
  }
  return report;
}

// ── ablation grids ────────────────────────────────────────────────────────

std::string display_label(Strategy s) {
  switch (s) {
    case Strategy::single_shot: return "Single-Shot";
    case Strategy::retry: return "Retry";
    case Strategy::no_adaptation: return "MTP w/o Memory Adaptation";
    case Strategy::mtp: return "MTP";
  }
  return "?";
}

const std::vector<Strategy>& default_ablation_strategies() {
  static const std::vector<Strategy> kStrategies{Strategy::retry, Strategy::no_adaptation,
                                                 Strategy::mtp};
  return kStrategies;
}

AblationTable run_ablation(const Suite& suite, const std::vector<Memory>& memories,
                           const std::vector<Strategy>& strategies, const EvalConfig& config,
                           const CompletionProvider& provider, const EmbeddingProvider& embedder,
                           const PromptTemplate& templates) {
  if (memories.empty()) throw ValidationError("ablation needs at least one memory");
  if (strategies.empty()) throw ValidationError("ablation needs at least one strategy");
  AblationTable table;
  table.suite = suite.name;
  table.seed = config.seed;
  table.repeats = config.repeats;
  for (const Memory& memory : memories) {
    for (Strategy strategy : strategies) {
      EvalConfig cell_config = config;
      cell_config.strategy = strategy;
      SuiteResult result = run_eval(suite, memory, cell_config, provider, embedder, templates);
      AblationCell cell;
      cell.memory_label = memory_label_of(memory);
      cell.strategy = strategy;
      cell.mean_percent = result.mean_percent;
      cell.std_percent = result.std_percent;
      cell.summary = result.summary;
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

nlohmann::ordered_json ablation_to_json(const AblationTable& table) {
  ordered_json out;
  out["suite"] = table.suite;
  out["seed"] = table.seed;
  out["repeats"] = table.repeats;
  ordered_json rows = ordered_json::array();
  for (const auto& cell : table.cells) {
    ordered_json row;
    row["memory"] = cell.memory_label;
    row["strategy"] = to_string(cell.strategy);
    row["label"] = display_label(cell.strategy);
    row["mean_percent"] = cell.mean_percent;
    row["std_percent"] = cell.std_percent;
    row["summary"] = cell.summary;
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  return out;
}

std::string render_ablation_table(const AblationTable& table) {
  // Grid shape: one row per memory, one column per strategy (in cell order).
  std::vector<std::string> memory_order;
  std::vector<Strategy> strategy_order;
  for (const auto& cell : table.cells) {
    if (std::find(memory_order.begin(), memory_order.end(), cell.memory_label) ==
        memory_order.end())
      memory_order.push_back(cell.memory_label);
    if (std::find(strategy_order.begin(), strategy_order.end(), cell.strategy) ==
        strategy_order.end())
      strategy_order.push_back(cell.strategy);
  }
  auto cell_text = [&](const std::string& memory, Strategy strategy) -> std::string {
    for (const auto& cell : table.cells)
      if (cell.memory_label == memory && cell.strategy == strategy) return cell.summary;
    return "-";
  };

  std::size_t memory_width = std::string("memory").size();
  for (const auto& label : memory_order) memory_width = std::max(memory_width, label.size());
  std::vector<std::size_t> column_widths;
  for (Strategy strategy : strategy_order) {
    std::size_t width = display_label(strategy).size();
    for (const auto& label : memory_order)
      width = std::max(width, cell_text(label, strategy).size());
    column_widths.push_back(width);
  }

  std::ostringstream out;
  out << "suite: " << table.suite << "   seed: " << table.seed
      << "   repeats: " << table.repeats << "\n";
  out << pad_right("memory", memory_width);
  for (std::size_t c = 0; c < strategy_order.size(); ++c)
    out << "  " << pad_left(display_label(strategy_order[c]), column_widths[c]);
  out << "\n";
  for (const auto& label : memory_order) {
    out << pad_right(label, memory_width);
    for (std::size_t c = 0; c < strategy_order.size(); ++c)
      out << "  " << pad_left(cell_text(label, strategy_order[c]), column_widths[c]);
    out << "\n";
  }
  return out.str();
}

// ── inspection ────────────────────────────────────────────────────────────

std::string describe_memory(const Memory& memory) {
  std::ostringstream out;
  out << memory_label_of(memory) << ": " << memory.size()
      << (memory.size() == 1 ? " record" : " records") << "\n";
  std::map<std::string, int> per_environment;
  for (const auto& log : memory.logs) ++per_environment[log.environment];
  for (const auto& [environment, count] : per_environment)
    out << "  " << environment << ": " << count << "\n";
  for (std::size_t i = 0; i < memory.logs.size(); ++i) {
    const SuccessLog& log = memory.logs[i];
    const PlannerProgram program = parse_program(log.code);
    out << "  [" << i << "] (" << log.environment << ") \"" << log.instruction << "\" — "
        << program.steps.size() << (program.steps.size() == 1 ? " step" : " steps") << "\n";
  }
  return out.str();
}

}  // namespace mtp
