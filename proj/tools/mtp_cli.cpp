// Command-line front end: build memories, evaluate suites, run ablation
// grids, replay episode logs and inspect memory files.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtp/errors.hpp"
#include "mtp/harness.hpp"
#include "mtp/memory_store.hpp"
#include "mtp/prompts.hpp"
#include "mtp/providers.hpp"
#include "mtp/suite.hpp"

namespace {

constexpr const char* kUsage = R"(usage: mtp <command> [flags]

commands:
  eval            run an evaluation suite and report success rates
  build-memory    run a suite and save successful programs as memory
  ablation        compare strategies across one or more memories
  replay          re-execute an episode log and check it for drift
  inspect-memory  summarize a memory file

flags:
  --suite <file>        suite JSON (eval, build-memory, ablation, replay)
  --memory <file>       memory JSON; repeat the flag for ablation grids
  --strategy <name>     single_shot | retry | no_adaptation | mtp
                        (default: mtp for eval, retry for build-memory)
  --repeats <n>         evaluation repeats (default 3)
  --seed <n>            base seed for initial-state jitter (default 7)
  --out <file>          results JSON / built memory path
  --provider <spec>     scripted:<script.json> | http (http needs --config)
  --adapter <name>      rule | llm (default rule)
  --env-filter <name>   restrict the memory to one source environment
  --max-trials <n>      attempts per episode (default 3)
  --config <file>       provider/embedder configuration JSON
  --templates <dir>     prompt template directory (default: built-in)
  --jobs <n>            worker threads (default: one per task, CPU-capped)
  --episode-log <file>  write a per-trial JSONL trace (eval)
  --log <file>          episode log to replay
  --paraphrase          cycle paraphrased instructions across repeats
)";

struct Options {
  std::string command;
  std::string suite_path;
  std::vector<std::string> memory_paths;
  std::string strategy;  // empty = per-command default
  int repeats = 3;
  std::uint64_t seed = 7;
  std::string out_path;
  std::string provider_spec;
  std::string adapter = "rule";
  std::string env_filter;
  int max_trials = 3;
  std::string config_path;
  std::string templates_dir;
  int jobs = 0;
  std::string episode_log_path;
  std::string log_path;
  bool paraphrase = false;
};

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n\n" << kUsage;
  std::exit(2);
}

int parse_int(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    usage_error(flag + " expects an integer, got \"" + text + "\"");
  }
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    usage_error("--seed expects a non-negative integer, got \"" + text + "\"");
  }
}

Options parse_options(int argc, char** argv) {
  if (argc < 2) usage_error("missing command");
  Options options;
  options.command = argv[1];
  if (options.command == "-h" || options.command == "--help" || options.command == "help") {
    std::cout << kUsage;
    std::exit(0);
  }
  int i = 2;
  auto next_value = [&](const std::string& flag) -> std::string {
    if (i + 1 >= argc) usage_error(flag + " needs a value");
    return argv[++i];
  };
  for (; i < argc; ++i) {
    const std::string flag = argv[i];
    if (flag == "--suite") options.suite_path = next_value(flag);
    else if (flag == "--memory") options.memory_paths.push_back(next_value(flag));
    else if (flag == "--strategy") options.strategy = next_value(flag);
    else if (flag == "--repeats") options.repeats = parse_int(next_value(flag), flag);
    else if (flag == "--seed") options.seed = parse_seed(next_value(flag));
    else if (flag == "--out") options.out_path = next_value(flag);
    else if (flag == "--provider") options.provider_spec = next_value(flag);
    else if (flag == "--adapter") options.adapter = next_value(flag);
    else if (flag == "--env-filter") options.env_filter = next_value(flag);
    else if (flag == "--max-trials") options.max_trials = parse_int(next_value(flag), flag);
    else if (flag == "--config") options.config_path = next_value(flag);
    else if (flag == "--templates") options.templates_dir = next_value(flag);
    else if (flag == "--jobs") options.jobs = parse_int(next_value(flag), flag);
    else if (flag == "--episode-log") options.episode_log_path = next_value(flag);
    else if (flag == "--log") options.log_path = next_value(flag);
    else if (flag == "--paraphrase") options.paraphrase = true;
    else usage_error("unknown flag \"" + flag + "\"");
  }
  return options;
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mtp::IoError("cannot read config file: " + path);
  nlohmann::json config = nlohmann::json::parse(in, nullptr, false);
  if (config.is_discarded()) throw mtp::ValidationError("config: not valid JSON");
  return config;
}

std::unique_ptr<mtp::CompletionProvider> make_provider(const Options& options) {
  const std::string& spec = options.provider_spec;
  if (spec.empty()) usage_error("this command needs --provider");
  if (spec.rfind("scripted:", 0) == 0) {
    const std::string path = spec.substr(std::string("scripted:").size());
    if (path.empty()) usage_error("--provider scripted:<path> needs a script path");
    return std::make_unique<mtp::ScriptedProvider>(mtp::ScriptedProvider::load(path));
  }
  if (spec == "http") {
    if (options.config_path.empty()) usage_error("--provider http needs --config");
    const nlohmann::json config = load_config(options.config_path);
    if (!config.contains("provider"))
      throw mtp::ValidationError("config: missing \"provider\" section");
    const nlohmann::json& section = config["provider"];
    mtp::HttpProviderConfig http;
    http.endpoint = section.at("endpoint").get<std::string>();
    if (section.contains("model")) http.model = section["model"].get<std::string>();
    if (section.contains("max_retries")) http.max_retries = section["max_retries"].get<int>();
    if (section.contains("backoff_base_seconds"))
      http.backoff_base_seconds = section["backoff_base_seconds"].get<double>();
    if (section.contains("backoff_factor"))
      http.backoff_factor = section["backoff_factor"].get<double>();
    if (section.contains("timeout_seconds"))
      http.timeout_seconds = section["timeout_seconds"].get<double>();
    if (section.contains("auth_env_var"))
      http.auth_env_var = section["auth_env_var"].get<std::string>();
    return std::make_unique<mtp::HttpCompletionProvider>(http);
  }
  usage_error("unknown provider \"" + spec + "\" (expected scripted:<path> or http)");
}

std::unique_ptr<mtp::EmbeddingProvider> make_embedder(const Options& options) {
  if (!options.config_path.empty()) {
    const nlohmann::json config = load_config(options.config_path);
    if (config.contains("embedder")) {
      const nlohmann::json& section = config["embedder"];
      if (section.contains("endpoint")) {
        mtp::RemoteEmbeddingConfig remote;
        remote.endpoint = section["endpoint"].get<std::string>();
        if (section.contains("model")) remote.model = section["model"].get<std::string>();
        if (section.contains("timeout_seconds"))
          remote.timeout_seconds = section["timeout_seconds"].get<double>();
        if (section.contains("auth_env_var"))
          remote.auth_env_var = section["auth_env_var"].get<std::string>();
        return std::make_unique<mtp::RemoteEmbeddingProvider>(remote);
      }
      mtp::HashedNgramConfig hashed;
      if (section.contains("dimension"))
        hashed.dimension = section["dimension"].get<std::size_t>();
      if (section.contains("ngram")) hashed.ngram = section["ngram"].get<std::size_t>();
      if (section.contains("seed")) hashed.seed = section["seed"].get<std::uint64_t>();
      return std::make_unique<mtp::HashedNgramEmbedder>(hashed);
    }
  }
  return std::make_unique<mtp::HashedNgramEmbedder>();
}

mtp::PromptTemplate make_templates(const Options& options) {
  return options.templates_dir.empty() ? mtp::builtin_templates()
                                       : mtp::load_templates(options.templates_dir);
}

mtp::Memory load_eval_memory(const Options& options) {
  mtp::Memory memory;
  if (!options.memory_paths.empty()) memory = mtp::load_memory(options.memory_paths.front());
  if (!options.env_filter.empty()) memory = mtp::filter_by_environment(memory, options.env_filter);
  return memory;
}

mtp::EvalConfig make_eval_config(const Options& options, mtp::Strategy default_strategy) {
  mtp::EvalConfig config;
  config.strategy = options.strategy.empty() ? default_strategy
                                             : mtp::strategy_from_string(options.strategy);
  config.repeats = options.repeats;
  config.max_trials = options.max_trials;
  config.seed = options.seed;
  config.jobs = options.jobs;
  config.cycle_paraphrases = options.paraphrase;
  config.adapter = options.adapter;
  return config;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mtp::IoError("cannot write file: " + path);
  out << content;
}

int cmd_eval(const Options& options) {
  if (options.suite_path.empty()) usage_error("eval needs --suite");
  const mtp::Suite suite = mtp::load_suite(options.suite_path);
  const mtp::Memory memory = load_eval_memory(options);
  const mtp::EvalConfig config = make_eval_config(options, mtp::Strategy::mtp);
  const auto provider = make_provider(options);
  const auto embedder = make_embedder(options);
  const mtp::PromptTemplate templates = make_templates(options);

  const mtp::SuiteResult result =
      mtp::run_eval(suite, memory, config, *provider, *embedder, templates);

  std::cout << mtp::render_eval_table(result);
  const std::string out_path = options.out_path.empty() ? "eval_results.json" : options.out_path;
  write_text_file(out_path, mtp::render_suite_result(result));
  std::cout << "results written to " << out_path << "\n";
  if (!options.episode_log_path.empty()) {
    std::ofstream log(options.episode_log_path, std::ios::binary);
    if (!log) throw mtp::IoError("cannot write episode log: " + options.episode_log_path);
    mtp::write_episode_log(log, result);
    std::cout << "episode log written to " << options.episode_log_path << "\n";
  }
  return 0;
}

int cmd_build_memory(const Options& options) {
  if (options.suite_path.empty()) usage_error("build-memory needs --suite");
  const mtp::Suite suite = mtp::load_suite(options.suite_path);
  const mtp::EvalConfig config = make_eval_config(options, mtp::Strategy::retry);
  const auto provider = make_provider(options);
  const auto embedder = make_embedder(options);
  const mtp::PromptTemplate templates = make_templates(options);

  mtp::Memory seed_memory;
  if (!options.memory_paths.empty()) seed_memory = mtp::load_memory(options.memory_paths.front());

  const mtp::BuildReport report =
      mtp::build_memory(suite, config, *provider, *embedder, templates, std::move(seed_memory));

  const std::string out_path = options.out_path.empty() ? "memory.json" : options.out_path;
  mtp::save_memory(report.memory, out_path);
  std::cout << "committed " << report.succeeded << "/" << report.attempted << " successes to "
            << out_path << "\n";
  for (const auto& task_id : report.failed_task_ids)
    std::cout << "  failed: " << task_id << "\n";
  return 0;
}

int cmd_ablation(const Options& options) {
  if (options.suite_path.empty()) usage_error("ablation needs --suite");
  if (options.memory_paths.empty()) usage_error("ablation needs at least one --memory");
  const mtp::Suite suite = mtp::load_suite(options.suite_path);
  std::vector<mtp::Memory> memories;
  for (const auto& path : options.memory_paths) {
    mtp::Memory memory = mtp::load_memory(path);
    if (!options.env_filter.empty())
      memory = mtp::filter_by_environment(memory, options.env_filter);
    memories.push_back(std::move(memory));
  }
  const mtp::EvalConfig config = make_eval_config(options, mtp::Strategy::mtp);
  const auto provider = make_provider(options);
  const auto embedder = make_embedder(options);
  const mtp::PromptTemplate templates = make_templates(options);

  const mtp::AblationTable table = mtp::run_ablation(
      suite, memories, mtp::default_ablation_strategies(), config, *provider, *embedder,
      templates);

  std::cout << mtp::render_ablation_table(table);
  const std::string out_path =
      options.out_path.empty() ? "ablation_results.json" : options.out_path;
  write_text_file(out_path, mtp::ablation_to_json(table).dump(2) + "\n");
  std::cout << "results written to " << out_path << "\n";
  return 0;
}

int cmd_replay(const Options& options) {
  if (options.suite_path.empty()) usage_error("replay needs --suite");
  if (options.log_path.empty()) usage_error("replay needs --log");
  const mtp::Suite suite = mtp::load_suite(options.suite_path);
  std::ifstream in(options.log_path);
  if (!in) throw mtp::IoError("cannot read episode log: " + options.log_path);
  const mtp::ReplayReport report = mtp::replay_episode_log(suite, in, &std::cout);
  std::cout << "replayed " << report.episodes << " episodes, " << report.programs
            << " programs, " << report.steps << " steps: no drift\n";
  return 0;
}

int cmd_inspect_memory(const Options& options) {
  if (options.memory_paths.empty()) usage_error("inspect-memory needs --memory");
  for (const auto& path : options.memory_paths) {
    mtp::Memory memory = mtp::load_memory(path);
    if (!options.env_filter.empty())
      memory = mtp::filter_by_environment(memory, options.env_filter);
    std::cout << mtp::describe_memory(memory);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const Options options = parse_options(argc, argv);
  try {
    if (options.command == "eval") return cmd_eval(options);
    if (options.command == "build-memory") return cmd_build_memory(options);
    if (options.command == "ablation") return cmd_ablation(options);
    if (options.command == "replay") return cmd_replay(options);
    if (options.command == "inspect-memory") return cmd_inspect_memory(options);
    usage_error("unknown command \"" + options.command + "\"");
  } catch (const mtp::DriftError& e) {
    std::cerr << "drift at step " << e.step << ": " << e.what() << "\n";
    return 1;
  } catch (const mtp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
