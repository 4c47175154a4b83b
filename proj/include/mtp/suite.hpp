#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtp/replanner.hpp"
#include "mtp/world_sim.hpp"

namespace mtp {

// A benchmark suite: named environments plus the tasks that run in them.
struct Suite {
  std::string name;
  EnvironmentRegistry environments;
  // Few-shot example programs shown in prompts, per environment.
  std::map<std::string, std::vector<std::string>> prompt_examples;
  std::vector<TaskSpec> tasks;  // file order preserved

  const std::vector<std::string>& examples_for(const std::string& environment) const;
};

// Parses the JSON suite format:
//   {"name": ..., "environments": [...], "tasks": [...]}
// Environments carry the simulator profile ("naming_style", "unit_scale",
// "requires_default_pose_init", "default_pose_trailer", "workspace_bounds",
// "default_pose", "top_clearance") and optional "prompt_examples". Tasks name
// their environment, instruction, scene objects and a "success" predicate
// tree ({"all"/"any"/"not"/"ever"/"above"/"inside"/"displaced"/
// "gripper_open"/"holding_nothing"/"yaw_changed"}). Shape problems throw
// ValidationError with the offending task or environment named.
Suite parse_suite_text(const std::string& text);

// Reads and parses a suite file; IoError when unreadable.
Suite load_suite(const std::filesystem::path& path);

// The predicate subtree parser, exposed for tests.
PredicatePtr parse_predicate(const nlohmann::json& node);

}  // namespace mtp
