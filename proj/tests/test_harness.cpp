#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtp/embedding.hpp"
#include "mtp/errors.hpp"
#include "mtp/harness.hpp"
#include "mtp/memory_store.hpp"
#include "mtp/prompts.hpp"
#include "mtp/providers.hpp"
#include "mtp/suite.hpp"

using namespace mtp;

namespace {

// Two-task suite: one task the scripted provider can solve on the first try,
// one it has no reply for. The displacement predicate keys off z, which the
// jitter never touches, so outcomes are identical across repeats.
const char* kMicroSuite = R"({
  "name": "micro",
  "environments": [
    {
      "name": "lab",
      "unit_scale": 1.0,
      "top_clearance": 0.1,
      "default_pose": [0.5, 0.5, 0.4],
      "workspace_bounds": {"min": [0, 0, 0], "max": [1, 1, 1]}
    }
  ],
  "tasks": [
    {
      "id": "win_task",
      "environment": "lab",
      "instruction": "raise the puck",
      "objects": [{"name": "puck", "position": [0.30, 0.40, 0.02]}],
      "success": {"ever": {"displaced": {"object": "puck", "axis": "z", "min": 0.05, "direction": "positive"}}}
    },
    {
      "id": "lose_task",
      "environment": "lab",
      "instruction": "spin the washer",
      "objects": [{"name": "washer", "position": [0.60, 0.60, 0.02]}],
      "success": {"ever": {"displaced": {"object": "washer", "axis": "z", "min": 0.05, "direction": "positive"}}}
    }
  ]
})";

const char* kWinProgram =
    "objects = ['puck']\n"
    "# Query: raise the puck\n"
    "composer(\"grasp the puck\")\n"
    "composer(\"move gripper 10cm up\")\n"
    "# done";

ScriptedProvider micro_provider() {
  nlohmann::json script;
  script["strict"] = false;
  script["entries"] = nlohmann::json::array(
      {{{"match", nlohmann::json::array({"## New task", "raise the puck"})},
        {"response", kWinProgram}}});
  return ScriptedProvider::from_json_text(script.dump());
}

EvalConfig micro_config() {
  EvalConfig config;
  config.strategy = Strategy::retry;
  config.repeats = 2;
  return config;
}

SuiteResult run_micro(int jobs = 0) {
  const Suite suite = parse_suite_text(kMicroSuite);
  const ScriptedProvider provider = micro_provider();
  const HashedNgramEmbedder embedder;
  EvalConfig config = micro_config();
  config.jobs = jobs;
  return run_eval(suite, Memory{}, config, provider, embedder, builtin_templates());
}

}  // namespace

// ── deterministic randomness ────────────────────────────────────────────────

TEST_CASE("splitmix64 from a zero state reproduces the reference sequence") {
  // First four outputs of the published reference implementation, computed
  // independently and frozen here; any platform or refactor drift breaks this.
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == UINT64_C(0xE220A8397B1DCDAF));
  CHECK(splitmix64(state) == UINT64_C(0x6E789E6AA1B965F4));
  CHECK(splitmix64(state) == UINT64_C(0x06C45D188009454F));
  CHECK(splitmix64(state) == UINT64_C(0xF88BB8A8724C81EC));
  CHECK(state != 0);
}

TEST_CASE("uniform_unit draws the top 53 bits into [0, 1)") {
  std::uint64_t state = 0;
  // (0xE220A8397B1DCDAF >> 11) * 2^-53, computed by hand.
  CHECK(uniform_unit(state) == doctest::Approx(0.8833108082136426).epsilon(1e-15));

  for (std::uint64_t seed : {UINT64_C(1), UINT64_C(7), UINT64_C(123456789)}) {
    std::uint64_t s = seed;
    for (int i = 0; i < 10000; ++i) {
      const double v = uniform_unit(s);
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }

  std::uint64_t a = 42, b = 42;
  for (int i = 0; i < 100; ++i) CHECK(uniform_unit(a) == uniform_unit(b));
}

TEST_CASE("mix_seed gives every (seed, repeat, task) triple its own stream") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {UINT64_C(0), UINT64_C(7)}) {
    for (std::uint64_t repeat = 0; repeat < 3; ++repeat) {
      for (std::uint64_t task = 0; task < 3; ++task) {
        seen.insert(mix_seed(seed, repeat, task));
      }
    }
  }
  CHECK(seen.size() == 18);  // all distinct
  CHECK(mix_seed(7, 1, 2) == mix_seed(7, 1, 2));
}

TEST_CASE("jittered_task perturbs x and y inside the range and never touches z") {
  const Suite suite = parse_suite_text(kMicroSuite);
  const TaskSpec& base = suite.tasks[0];

  const TaskSpec jittered = jittered_task(base, 7, 0, 0);
  REQUIRE(jittered.initial_scene.size() == 1);
  const SceneObject& puck = jittered.initial_scene[0];
  const SceneObject& original = base.initial_scene[0];

  CHECK(std::abs(puck.position.x - original.position.x) <= kJitterRange + 1e-12);
  CHECK(std::abs(puck.position.y - original.position.y) <= kJitterRange + 1e-12);
  CHECK(puck.position.z == original.position.z);
  const bool moved = puck.position.x != original.position.x ||
                     puck.position.y != original.position.y;
  CHECK(moved);  // repeat 0 is jittered too, not a pristine baseline

  // everything except positions survives untouched
  CHECK(jittered.id == base.id);
  CHECK(jittered.instruction == base.instruction);
  CHECK(puck.name == original.name);
  CHECK(puck.graspable == original.graspable);
  CHECK(puck.yaw == original.yaw);

  const TaskSpec again = jittered_task(base, 7, 0, 0);
  CHECK(again.initial_scene[0].position.x == puck.position.x);  // bitwise
  CHECK(again.initial_scene[0].position.y == puck.position.y);

  const TaskSpec other_repeat = jittered_task(base, 7, 1, 0);
  const TaskSpec other_task = jittered_task(base, 7, 0, 1);
  const TaskSpec other_seed = jittered_task(base, 8, 0, 0);
  CHECK((other_repeat.initial_scene[0].position.x != puck.position.x ||
         other_repeat.initial_scene[0].position.y != puck.position.y));
  CHECK((other_task.initial_scene[0].position.x != puck.position.x ||
         other_task.initial_scene[0].position.y != puck.position.y));
  CHECK((other_seed.initial_scene[0].position.x != puck.position.x ||
         other_seed.initial_scene[0].position.y != puck.position.y));
}

TEST_CASE("jitter clamps into the workspace at both edges") {
  Suite suite = parse_suite_text(kMicroSuite);
  TaskSpec task = suite.tasks[0];
  task.initial_scene[0].position = {0.0, 1.0, 0.02};  // pinned to min x, max y

  for (int repeat = 0; repeat < 20; ++repeat) {
    const TaskSpec jittered = jittered_task(task, 7, repeat, 0);
    const Vec3& p = jittered.initial_scene[0].position;
    CHECK(p.x >= 0.0);
    CHECK(p.x <= kJitterRange + 1e-12);
    CHECK(p.y <= 1.0);
    CHECK(p.y >= 1.0 - kJitterRange - 1e-12);
  }
}

// ── statistics ──────────────────────────────────────────────────────────────

TEST_CASE("mean, population std and the summary string match hand calculations") {
  const std::vector<double> rates = {1.0, 0.5, 0.0};
  CHECK(mean_of(rates) == doctest::Approx(0.5).epsilon(1e-15));
  // deviations ±0.5, 0 → sqrt((0.25 + 0 + 0.25) / 3) = sqrt(1/6)
  CHECK(population_std(rates) == doctest::Approx(0.4082482904638631).epsilon(1e-12));
  CHECK(format_mean_std_percent(mean_of(rates), population_std(rates)) == "50.0 ± 40.8");

  CHECK(mean_of({}) == 0.0);
  CHECK(population_std({}) == 0.0);
  CHECK(population_std({0.75}) == 0.0);
  CHECK(format_mean_std_percent(2.0 / 3.0, 0.0624) == "66.7 ± 6.2");
  CHECK(format_mean_std_percent(1.0, 0.0) == "100.0 ± 0.0");
}

// ── evaluation ──────────────────────────────────────────────────────────────

TEST_CASE("run_eval aggregates per task and per repeat") {
  const SuiteResult result = run_micro();

  CHECK(result.suite == "micro");
  CHECK(result.strategy == Strategy::retry);
  CHECK(result.adapter == "rule");
  CHECK(result.memory_label == "(none)");
  CHECK(result.seed == 7);
  CHECK(result.repeats == 2);
  CHECK(result.max_trials == 3);

  REQUIRE(result.tasks.size() == 2);
  CHECK(result.tasks[0].task_id == "win_task");
  CHECK(result.tasks[0].environment == "lab");
  CHECK(result.tasks[0].successes == 2);
  CHECK(result.tasks[0].attempts == 2);
  CHECK(result.tasks[0].percent == doctest::Approx(100.0));
  CHECK(result.tasks[1].task_id == "lose_task");
  CHECK(result.tasks[1].successes == 0);
  CHECK(result.tasks[1].percent == doctest::Approx(0.0));

  REQUIRE(result.repeat_rates.size() == 2);
  CHECK(result.repeat_rates[0] == doctest::Approx(0.5));
  CHECK(result.repeat_rates[1] == doctest::Approx(0.5));
  CHECK(result.mean_percent == doctest::Approx(50.0));
  CHECK(result.std_percent == doctest::Approx(0.0));
  CHECK(result.summary == "50.0 ± 0.0");

  // task-major, repeat-minor episode order
  REQUIRE(result.episodes.size() == 4);
  CHECK(result.episodes[0].task_index == 0);
  CHECK(result.episodes[0].repeat == 0);
  CHECK(result.episodes[1].task_index == 0);
  CHECK(result.episodes[1].repeat == 1);
  CHECK(result.episodes[2].task_index == 1);
  CHECK(result.episodes[2].repeat == 0);
  CHECK(result.episodes[3].task_index == 1);
  CHECK(result.episodes[3].repeat == 1);

  // the winning episodes really did succeed on the first attempt
  CHECK(result.episodes[0].episode.success);
  REQUIRE(result.episodes[0].episode.success_trial.has_value());
  CHECK(*result.episodes[0].episode.success_trial == 0);
  CHECK_FALSE(result.episodes[2].episode.success);
  // retry exhausts the whole budget on the losing task
  CHECK(result.episodes[2].episode.trials.size() == 3);
}

TEST_CASE("suite results serialize with stable fields") {
  const SuiteResult result = run_micro();
  const nlohmann::ordered_json doc = suite_result_to_json(result);

  CHECK(doc.at("suite") == "micro");
  CHECK(doc.at("strategy") == "retry");
  CHECK(doc.at("adapter") == "rule");
  CHECK(doc.at("memory") == "(none)");
  CHECK(doc.at("seed") == 7);
  CHECK(doc.at("repeats") == 2);
  CHECK(doc.at("max_trials") == 3);
  CHECK(doc.at("seeds") == nlohmann::ordered_json::array({7, 8}));
  REQUIRE(doc.at("tasks").size() == 2);
  CHECK(doc.at("tasks")[0].at("id") == "win_task");
  CHECK(doc.at("tasks")[0].at("environment") == "lab");
  CHECK(doc.at("tasks")[0].at("successes") == 2);
  CHECK(doc.at("tasks")[0].at("attempts") == 2);
  CHECK(doc.at("tasks")[0].at("percent") == 100.0);
  CHECK(doc.at("repeat_rates") == nlohmann::ordered_json::array({0.5, 0.5}));
  CHECK(doc.at("mean_percent") == 50.0);
  CHECK(doc.at("std_percent") == 0.0);
  CHECK(doc.at("summary") == "50.0 ± 0.0");

  const std::string rendered = render_suite_result(result);
  CHECK(rendered.back() == '\n');
  CHECK(rendered.find("\"suite\": \"micro\"") != std::string::npos);

  const std::string table = render_eval_table(result);
  CHECK(table.find("win_task") != std::string::npos);
  CHECK(table.find("2/2 (100.0)") != std::string::npos);
  CHECK(table.find("0/2 (0.0)") != std::string::npos);
  CHECK(table.find("mean ± std over 2 repeats: 50.0 ± 0.0") != std::string::npos);
}

TEST_CASE("identical configurations produce byte-identical reports") {
  const std::string first = render_suite_result(run_micro());
  const std::string second = render_suite_result(run_micro());
  CHECK(first == second);

  // concurrency must not leak into results: aggregation follows suite order
  const std::string serial = render_suite_result(run_micro(1));
  const std::string parallel = render_suite_result(run_micro(4));
  CHECK(serial == parallel);
  CHECK(serial == first);
}

TEST_CASE("paraphrase cycling swaps the instruction per repeat") {
  const char* suite_text = R"({
    "name": "micro-para",
    "environments": [
      {"name": "lab", "unit_scale": 1.0, "top_clearance": 0.1,
       "default_pose": [0.5, 0.5, 0.4],
       "workspace_bounds": {"min": [0, 0, 0], "max": [1, 1, 1]}}
    ],
    "tasks": [
      {"id": "lift", "environment": "lab", "instruction": "raise the puck",
       "paraphrases": ["shift the puck upward", "send the puck up"],
       "objects": [{"name": "puck", "position": [0.30, 0.40, 0.02]}],
       "success": {"ever": {"displaced": {"object": "puck", "axis": "z", "min": 0.05, "direction": "positive"}}}}
    ]
  })";
  const Suite suite = parse_suite_text(suite_text);
  const ScriptedProvider provider = micro_provider();  // matches nothing here
  const HashedNgramEmbedder embedder;

  EvalConfig config = micro_config();
  config.repeats = 3;
  config.cycle_paraphrases = true;
  SuiteResult cycled =
      run_eval(suite, Memory{}, config, provider, embedder, builtin_templates());
  REQUIRE(cycled.episodes.size() == 3);
  CHECK(cycled.episodes[0].episode.instruction == "shift the puck upward");
  CHECK(cycled.episodes[1].episode.instruction == "send the puck up");
  CHECK(cycled.episodes[2].episode.instruction == "shift the puck upward");  // wraps

  config.cycle_paraphrases = false;
  SuiteResult plain =
      run_eval(suite, Memory{}, config, provider, embedder, builtin_templates());
  for (const auto& run : plain.episodes) {
    CHECK(run.episode.instruction == "raise the puck");
  }
}

TEST_CASE("eval config validation rejects bad settings") {
  const Suite suite = parse_suite_text(kMicroSuite);
  const ScriptedProvider provider = micro_provider();
  const HashedNgramEmbedder embedder;

  EvalConfig bad_repeats = micro_config();
  bad_repeats.repeats = 0;
  CHECK_THROWS_AS(
      run_eval(suite, Memory{}, bad_repeats, provider, embedder, builtin_templates()),
      ValidationError);

  EvalConfig bad_trials = micro_config();
  bad_trials.max_trials = 0;
  CHECK_THROWS_AS(
      run_eval(suite, Memory{}, bad_trials, provider, embedder, builtin_templates()),
      ValidationError);

  EvalConfig bad_jobs = micro_config();
  bad_jobs.jobs = -1;
  CHECK_THROWS_AS(
      run_eval(suite, Memory{}, bad_jobs, provider, embedder, builtin_templates()),
      ValidationError);

  EvalConfig bad_adapter = micro_config();
  bad_adapter.adapter = "telepathy";
  CHECK_THROWS_AS(
      run_eval(suite, Memory{}, bad_adapter, provider, embedder, builtin_templates()),
      ValidationError);
}

// ── episode logs and replay ─────────────────────────────────────────────────

namespace {

std::vector<nlohmann::json> log_lines(const SuiteResult& result) {
  std::ostringstream out;
  write_episode_log(out, result);
  std::vector<nlohmann::json> lines;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) {
    lines.push_back(nlohmann::json::parse(line));
  }
  return lines;
}

std::string join_lines(const std::vector<nlohmann::json>& lines) {
  std::string out;
  for (const auto& line : lines) out += line.dump() + "\n";
  return out;
}

// Index of the first trial line that carries a program.
std::size_t first_programmed_trial(const std::vector<nlohmann::json>& lines) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].at("kind") == "trial" && !lines[i].at("program").is_null()) return i;
  }
  REQUIRE(false);
  return 0;
}

}  // namespace

TEST_CASE("episode logs replay without drift") {
  const Suite suite = parse_suite_text(kMicroSuite);
  const SuiteResult result = run_micro();

  std::ostringstream out;
  write_episode_log(out, result);
  std::istringstream in(out.str());
  const ReplayReport report = replay_episode_log(suite, in);

  CHECK(report.episodes == 4);
  CHECK(report.programs == 2);  // only the winning task produced programs
  CHECK(report.steps == 4);     // two steps per winning program, two repeats

  // the trace printer names each executed command
  std::istringstream again(out.str());
  std::ostringstream trace;
  replay_episode_log(suite, again, &trace);
  CHECK(trace.str().find("grasp the puck") != std::string::npos);
  CHECK(trace.str().find("move gripper 10cm up") != std::string::npos);
}

TEST_CASE("replay flags a tampered gripper coordinate") {
  const Suite suite = parse_suite_text(kMicroSuite);
  std::vector<nlohmann::json> lines = log_lines(run_micro());
  const std::size_t i = first_programmed_trial(lines);
  lines[i]["trace"][1]["gripper"][2] = 0.99;

  std::istringstream in(join_lines(lines));
  try {
    replay_episode_log(suite, in);
    FAIL("tampered log replayed cleanly");
  } catch (const DriftError& e) {
    CHECK(e.step == 1);
  }
}

TEST_CASE("replay flags a tampered step outcome") {
  const Suite suite = parse_suite_text(kMicroSuite);
  std::vector<nlohmann::json> lines = log_lines(run_micro());
  const std::size_t i = first_programmed_trial(lines);
  lines[i]["trace"][0]["outcome"] = "failed_step";

  std::istringstream in(join_lines(lines));
  try {
    replay_episode_log(suite, in);
    FAIL("tampered log replayed cleanly");
  } catch (const DriftError& e) {
    CHECK(e.step == 0);
  }
}

TEST_CASE("replay flags a flipped success verdict") {
  const Suite suite = parse_suite_text(kMicroSuite);
  std::vector<nlohmann::json> lines = log_lines(run_micro());
  const std::size_t i = first_programmed_trial(lines);
  lines[i]["success"] = false;

  std::istringstream in(join_lines(lines));
  CHECK_THROWS_AS(replay_episode_log(suite, in), DriftError);
}

TEST_CASE("replay rejects structurally broken logs") {
  const Suite suite = parse_suite_text(kMicroSuite);
  const std::vector<nlohmann::json> pristine = log_lines(run_micro());

  SUBCASE("success without a program") {
    std::vector<nlohmann::json> lines = pristine;
    const std::size_t i = first_programmed_trial(lines);
    lines[i]["program"] = nullptr;  // success stays true
    std::istringstream in(join_lines(lines));
    CHECK_THROWS_AS(replay_episode_log(suite, in), ValidationError);
  }
  SUBCASE("unknown task id") {
    std::vector<nlohmann::json> lines = pristine;
    lines[0]["task"] = "bogus_task";
    std::istringstream in(join_lines(lines));
    CHECK_THROWS_AS(replay_episode_log(suite, in), ValidationError);
  }
  SUBCASE("trial line before any episode line") {
    std::vector<nlohmann::json> lines = pristine;
    lines.erase(lines.begin());  // drop the leading episode header
    std::istringstream in(join_lines(lines));
    CHECK_THROWS_AS(replay_episode_log(suite, in), ValidationError);
  }
  SUBCASE("unknown line kind") {
    std::vector<nlohmann::json> lines = pristine;
    lines[0]["kind"] = "banana";
    std::istringstream in(join_lines(lines));
    CHECK_THROWS_AS(replay_episode_log(suite, in), ValidationError);
  }
  SUBCASE("not JSON at all") {
    std::istringstream in("this is not json\n");
    CHECK_THROWS_AS(replay_episode_log(suite, in), ValidationError);
  }
}

// ── memory building ─────────────────────────────────────────────────────────

TEST_CASE("build_memory commits successes in suite order and lists failures") {
  const Suite suite = parse_suite_text(kMicroSuite);
  const ScriptedProvider provider = micro_provider();
  const HashedNgramEmbedder embedder;

  const BuildReport report =
      build_memory(suite, micro_config(), provider, embedder, builtin_templates());

  CHECK(report.attempted == 2);
  CHECK(report.succeeded == 1);
  REQUIRE(report.failed_task_ids.size() == 1);
  CHECK(report.failed_task_ids[0] == "lose_task");

  REQUIRE(report.memory.size() == 1);
  const SuccessLog& log = report.memory.logs[0];
  CHECK(log.environment == "lab");
  CHECK(log.instruction == "raise the puck");
  CHECK(log.code ==
        "objects = ['puck']\n"
        "# Query: raise the puck\n"
        "composer(\"grasp the puck\")\n"
        "composer(\"move gripper 10cm up\")\n"
        "# done\n");

  // identical run, identical memory
  const BuildReport again =
      build_memory(suite, micro_config(), provider, embedder, builtin_templates());
  REQUIRE(again.memory.size() == 1);
  CHECK(again.memory.logs[0].code == log.code);
}

TEST_CASE("build_memory keeps seed records ahead of new ones") {
  const Suite suite = parse_suite_text(kMicroSuite);
  const ScriptedProvider provider = micro_provider();
  const HashedNgramEmbedder embedder;

  Memory seed;
  SuccessLog prior;
  prior.environment = "lab";
  prior.instruction = "open the jar";
  prior.code = "composer(\"open gripper\")\n";
  append_log(seed, prior);

  const BuildReport report =
      build_memory(suite, micro_config(), provider, embedder, builtin_templates(), seed);
  REQUIRE(report.memory.size() == 2);
  CHECK(report.memory.logs[0].instruction == "open the jar");
  CHECK(report.memory.logs[1].instruction == "raise the puck");
  CHECK(report.succeeded == 1);  // the new win, not the seed record
}

TEST_CASE("a strict script that lacks a reply records the failure instead of crashing") {
  const Suite suite = parse_suite_text(kMicroSuite);
  nlohmann::json script;
  script["strict"] = true;
  script["entries"] = nlohmann::json::array(
      {{{"match", nlohmann::json::array({"## New task", "raise the puck"})},
        {"response", kWinProgram}}});
  const ScriptedProvider provider = ScriptedProvider::from_json_text(script.dump());
  const HashedNgramEmbedder embedder;

  const BuildReport report =
      build_memory(suite, micro_config(), provider, embedder, builtin_templates());
  CHECK(report.succeeded == 1);
  REQUIRE(report.failed_task_ids.size() == 1);
  CHECK(report.failed_task_ids[0] == "lose_task");
}

// ── ablation grids ──────────────────────────────────────────────────────────

TEST_CASE("strategy display labels and the standard comparison set") {
  CHECK(display_label(Strategy::single_shot) == "Single-Shot");
  CHECK(display_label(Strategy::retry) == "Retry");
  CHECK(display_label(Strategy::no_adaptation) == "MTP w/o Memory Adaptation");
  CHECK(display_label(Strategy::mtp) == "MTP");

  const std::vector<Strategy>& standard = default_ablation_strategies();
  REQUIRE(standard.size() == 3);
  CHECK(standard[0] == Strategy::retry);
  CHECK(standard[1] == Strategy::no_adaptation);
  CHECK(standard[2] == Strategy::mtp);
}

TEST_CASE("run_ablation fills a memory-major grid") {
  const Suite suite = parse_suite_text(kMicroSuite);
  const ScriptedProvider provider = micro_provider();
  const HashedNgramEmbedder embedder;

  Memory alpha;
  alpha.source_label = "alpha";
  Memory beta;
  beta.source_label = "beta";
  SuccessLog log;
  log.environment = "lab";
  log.instruction = "open the jar";
  log.code = "composer(\"open gripper\")\n";
  append_log(beta, log);

  const AblationTable table =
      run_ablation(suite, {alpha, beta}, default_ablation_strategies(), micro_config(),
                   provider, embedder, builtin_templates());

  CHECK(table.suite == "micro");
  CHECK(table.seed == 7);
  CHECK(table.repeats == 2);
  REQUIRE(table.cells.size() == 6);
  CHECK(table.cells[0].memory_label == "alpha");
  CHECK(table.cells[0].strategy == Strategy::retry);
  CHECK(table.cells[2].memory_label == "alpha");
  CHECK(table.cells[2].strategy == Strategy::mtp);
  CHECK(table.cells[3].memory_label == "beta");
  CHECK(table.cells[3].strategy == Strategy::retry);
  // only the scripted win succeeds whatever the memory, so every cell is 50%
  for (const AblationCell& cell : table.cells) {
    CHECK(cell.mean_percent == doctest::Approx(50.0));
    CHECK(cell.summary == "50.0 ± 0.0");
  }

  const nlohmann::ordered_json doc = ablation_to_json(table);
  CHECK(doc.at("suite") == "micro");
  CHECK(doc.at("seed") == 7);
  CHECK(doc.at("repeats") == 2);
  REQUIRE(doc.at("rows").size() == 6);
  CHECK(doc.at("rows")[0].at("memory") == "alpha");
  CHECK(doc.at("rows")[0].at("strategy") == "retry");
  CHECK(doc.at("rows")[0].at("label") == "Retry");
  CHECK(doc.at("rows")[0].at("mean_percent") == 50.0);
  CHECK(doc.at("rows")[0].at("summary") == "50.0 ± 0.0");

  const std::string rendered = render_ablation_table(table);
  CHECK(rendered.find("Retry") != std::string::npos);
  CHECK(rendered.find("MTP w/o Memory Adaptation") != std::string::npos);
  CHECK(rendered.find("alpha") != std::string::npos);
  CHECK(rendered.find("beta") != std::string::npos);

  CHECK_THROWS_AS(run_ablation(suite, {}, default_ablation_strategies(), micro_config(),
                               provider, embedder, builtin_templates()),
                  ValidationError);
  CHECK_THROWS_AS(run_ablation(suite, {alpha}, {}, micro_config(), provider, embedder,
                               builtin_templates()),
                  ValidationError);
}

// ── inspection ──────────────────────────────────────────────────────────────

TEST_CASE("describe_memory prints a deterministic inventory") {
  Memory memory;
  memory.source_label = "demo";
  SuccessLog first;
  first.environment = "sim-a";
  first.instruction = "take the lid off the cup.";
  first.code =
      "objects = ['cup', 'lid']\n"
      "# Query: take the lid off the cup.\n"
      "composer(\"grasp the lid\")\n"
      "composer(\"move gripper 10cm up\")\n"
      "composer(\"back to default pose\")\n"
      "# done\n";
  append_log(memory, first);
  SuccessLog second;
  second.environment = "sim-b";
  second.instruction = "raise the flag up high.";
  second.code = "composer(\"grasp the flag\")\n";
  append_log(memory, second);

  CHECK(describe_memory(memory) ==
        "demo: 2 records\n"
        "  sim-a: 1\n"
        "  sim-b: 1\n"
        "  [0] (sim-a) \"take the lid off the cup.\" — 3 steps\n"
        "  [1] (sim-b) \"raise the flag up high.\" — 1 step\n");

  CHECK(describe_memory(Memory{}) == "(none): 0 records\n");

  Memory unlabeled;
  append_log(unlabeled, second);
  CHECK(describe_memory(unlabeled).rfind("(unlabeled): 1 record\n", 0) == 0);
}

// ── the model-backed adapter ────────────────────────────────────────────────

TEST_CASE("the llm adapter asks the provider to rewrite retrieved programs") {
  const char* suite_text = R"({
    "name": "micro-llm",
    "environments": [
      {"name": "lab", "unit_scale": 1.0, "top_clearance": 0.1,
       "default_pose": [0.5, 0.5, 0.4],
       "workspace_bounds": {"min": [0, 0, 0], "max": [1, 1, 1]}}
    ],
    "tasks": [
      {"id": "lift", "environment": "lab", "instruction": "raise the puck",
       "objects": [{"name": "puck", "position": [0.30, 0.40, 0.02]}],
       "success": {"ever": {"displaced": {"object": "puck", "axis": "z", "min": 0.05, "direction": "positive"}}}}
    ]
  })";
  const Suite suite = parse_suite_text(suite_text);

  Memory memory;
  SuccessLog recalled;
  recalled.environment = "lab";
  recalled.instruction = "lift the widget";
  recalled.code =
      "objects = ['widget']\n"
      "# Query: lift the widget\n"
      "composer(\"grasp the widget\")\n"
      "composer(\"move gripper 10cm up\")\n"
      "# done\n";
  append_log(memory, recalled);

  nlohmann::json script;
  script["strict"] = false;
  script["entries"] = nlohmann::json::array({
      // first attempt: a plausible plan that grabs a nonexistent object
      {{"match", nlohmann::json::array({"## New task", "raise the puck"})},
       {"response",
        "objects = ['puck']\n# Query: raise the puck\ncomposer(\"grasp the gizmo\")\n# done"}},
      // the adapter's rewrite request, answered with a near-miss distance
      {{"match", nlohmann::json::array({"## Adaptation task", "grasp the widget"})},
       {"response",
        "objects = ['puck']\n# Query: raise the puck\ncomposer(\"grasp the puck\")\ncomposer(\"move gripper 9cm up\")\n# done"}},
      // the re-planning turn that sees the rewrite and corrects it
      {{"match", nlohmann::json::array({"## Re-planning task", "9cm up"})},
       {"response",
        "objects = ['puck']\n# Query: raise the puck\ncomposer(\"grasp the puck\")\ncomposer(\"move gripper 10cm up\")\n# done"}},
  });
  const ScriptedProvider provider = ScriptedProvider::from_json_text(script.dump());
  const HashedNgramEmbedder embedder;

  EvalConfig config;
  config.strategy = Strategy::mtp;
  config.repeats = 1;
  config.adapter = "llm";
  const SuiteResult result =
      run_eval(suite, memory, config, provider, embedder, builtin_templates());

  REQUIRE(result.episodes.size() == 1);
  const EpisodeResult& episode = result.episodes[0].episode;
  CHECK(episode.success);
  REQUIRE(episode.success_trial.has_value());
  CHECK(*episode.success_trial == 1);
  REQUIRE(episode.trials.size() == 2);
  const TrialRecord& replan = episode.trials[1];
  CHECK(replan.adapted);
  REQUIRE(replan.retrieved_instruction.has_value());
  CHECK(*replan.retrieved_instruction == "lift the widget");
  REQUIRE(replan.adapted_code.has_value());
  CHECK(replan.adapted_code->find("9cm up") != std::string::npos);
}

TEST_CASE("an llm adapter with no scripted rewrite records a setup failure") {
  const Suite suite = parse_suite_text(kMicroSuite);

  Memory memory;
  SuccessLog recalled;
  recalled.environment = "lab";
  recalled.instruction = "lift the widget";
  recalled.code = "composer(\"grasp the widget\")\n";
  append_log(memory, recalled);

  // Only the naive generation reply exists; the adaptation prompt gets "".
  nlohmann::json script;
  script["strict"] = false;
  script["entries"] = nlohmann::json::array(
      {{{"match", nlohmann::json::array({"## New task", "spin the washer"})},
        {"response",
         "objects = ['washer']\n# Query: spin the washer\ncomposer(\"grasp the sprocket\")\n# done"}}});
  const ScriptedProvider provider = ScriptedProvider::from_json_text(script.dump());
  const HashedNgramEmbedder embedder;

  EvalConfig config;
  config.strategy = Strategy::mtp;
  config.repeats = 1;
  config.adapter = "llm";
  const SuiteResult result =
      run_eval(suite, memory, config, provider, embedder, builtin_templates());

  const EpisodeResult& episode = result.episodes[1].episode;  // washer task
  CHECK_FALSE(episode.success);
  REQUIRE(episode.trials.size() == 3);
  REQUIRE(episode.trials[1].failure_reason.has_value());
  CHECK(episode.trials[1].failure_reason->rfind("trial setup failed: ", 0) == 0);
}

// ── suite files ─────────────────────────────────────────────────────────────

TEST_CASE("shipped suite files load with fully resolved environments") {
  const std::string root = MTP_REPO_DIR;
  const Suite target = load_suite(root + "/data/suites/target_suite.json");

  CHECK(target.name == "target-desk");
  REQUIRE(target.tasks.size() == 6);
  CHECK(target.tasks[0].id == "t1_remove_lid");
  CHECK(target.tasks[0].environment.name == "desk-b");
  CHECK(target.tasks[0].environment.naming_style == NamingStyle::suffixed);
  CHECK(target.tasks[0].environment.requires_default_pose_init);
  CHECK(target.tasks[0].environment.default_pose_trailer);
  CHECK(target.tasks[0].environment.unit_scale == 1.0);
  CHECK(target.tasks[0].environment.top_clearance == 0.1);
  CHECK(target.tasks[0].environment.workspace_bounds.max.z == 0.6);

  const EnvironmentProfile* sim_a = target.environments.find("sim-a");
  REQUIRE(sim_a != nullptr);
  CHECK(sim_a->unit_scale == 2.0);
  CHECK(target.environments.find("nowhere") == nullptr);

  REQUIRE(target.examples_for("desk-b").size() == 1);
  CHECK(target.examples_for("desk-b")[0].rfind("objects = ['box_base'", 0) == 0);
  CHECK(target.examples_for("nowhere").empty());

  // every shipped suite parses and every task's environment is registered
  for (const char* name : {"source_suite.json", "source_suite_narrow.json",
                           "target_suite.json", "eval_suite_b.json"}) {
    const Suite suite = load_suite(root + "/data/suites/" + name);
    CHECK_FALSE(suite.tasks.empty());
    for (const TaskSpec& task : suite.tasks) {
      CHECK(suite.environments.find(task.environment.name) != nullptr);
      CHECK_FALSE(task.initial_scene.empty());
      CHECK(task.success != nullptr);
    }
  }

  CHECK_THROWS_AS(load_suite(root + "/data/suites/missing.json"), IoError);
}

TEST_CASE("suite validation rejects malformed definitions") {
  auto suite_with = [](const std::string& tasks) {
    return std::string(R"({"name": "bad", "environments": [
      {"name": "lab", "unit_scale": 1.0, "top_clearance": 0.1,
       "default_pose": [0.5, 0.5, 0.4],
       "workspace_bounds": {"min": [0, 0, 0], "max": [1, 1, 1]}}
    ], "tasks": [)") + tasks + "]}";
  };
  const std::string ok_task = R"({"id": "a", "environment": "lab", "instruction": "go",
    "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0]}],
    "success": {"gripper_open": {}}})";

  CHECK_NOTHROW(parse_suite_text(suite_with(ok_task)));

  SUBCASE("root must be an object") {
    CHECK_THROWS_AS(parse_suite_text("[]"), ValidationError);
  }
  SUBCASE("unknown environment in a task") {
    std::string task = ok_task;
    task.replace(task.find("\"lab\""), 5, "\"moon\"");
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("duplicate task ids") {
    CHECK_THROWS_AS(parse_suite_text(suite_with(ok_task + "," + ok_task)), ValidationError);
  }
  SUBCASE("duplicate environment names") {
    const char* text = R"({"name": "bad", "environments": [
      {"name": "lab", "unit_scale": 1.0, "top_clearance": 0.1,
       "default_pose": [0.5, 0.5, 0.4],
       "workspace_bounds": {"min": [0, 0, 0], "max": [1, 1, 1]}},
      {"name": "lab", "unit_scale": 1.0, "top_clearance": 0.1,
       "default_pose": [0.5, 0.5, 0.4],
       "workspace_bounds": {"min": [0, 0, 0], "max": [1, 1, 1]}}
    ], "tasks": []})";
    CHECK_THROWS_AS(parse_suite_text(text), ValidationError);
  }
  SUBCASE("non-positive unit scale") {
    const char* text = R"({"name": "bad", "environments": [
      {"name": "lab", "unit_scale": 0.0, "top_clearance": 0.1,
       "default_pose": [0.5, 0.5, 0.4],
       "workspace_bounds": {"min": [0, 0, 0], "max": [1, 1, 1]}}
    ], "tasks": []})";
    CHECK_THROWS_AS(parse_suite_text(text), ValidationError);
  }
  SUBCASE("empty scene") {
    std::string task = R"({"id": "a", "environment": "lab", "instruction": "go",
      "objects": [], "success": {"gripper_open": {}}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("missing instruction") {
    std::string task = R"({"id": "a", "environment": "lab",
      "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0]}],
      "success": {"gripper_open": {}}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("unknown predicate") {
    std::string task = R"({"id": "a", "environment": "lab", "instruction": "go",
      "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0]}],
      "success": {"hovering": {}}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("bad displacement axis") {
    std::string task = R"({"id": "a", "environment": "lab", "instruction": "go",
      "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0]}],
      "success": {"displaced": {"object": "puck", "axis": "w", "min": 0.1, "direction": "positive"}}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("bad displacement direction") {
    std::string task = R"({"id": "a", "environment": "lab", "instruction": "go",
      "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0]}],
      "success": {"displaced": {"object": "puck", "axis": "z", "min": 0.1, "direction": "both"}}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("empty combinator list") {
    std::string task = R"({"id": "a", "environment": "lab", "instruction": "go",
      "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0]}],
      "success": {"all": []}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("non-positive container radius") {
    std::string task = R"({"id": "a", "environment": "lab", "instruction": "go",
      "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0], "container_radius": 0.0}],
      "success": {"gripper_open": {}}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
  SUBCASE("non-positive step budget") {
    std::string task = R"({"id": "a", "environment": "lab", "instruction": "go",
      "max_steps": 0,
      "objects": [{"name": "puck", "position": [0.5, 0.5, 0.0]}],
      "success": {"gripper_open": {}}})";
    CHECK_THROWS_AS(parse_suite_text(suite_with(task)), ValidationError);
  }
}
