#pragma once

#include <map>
#include <string>
#include <vector>

#include "mtp/composer_dsl.hpp"
#include "mtp/memory_store.hpp"
#include "mtp/prompts.hpp"
#include "mtp/providers.hpp"
#include "mtp/world_sim.hpp"

namespace mtp {

struct AdaptationResult {
  PlannerProgram program;
  std::string code;  // rendered text of `program`
  // How source object references were retargeted (identity mappings included).
  std::map<std::string, std::string> object_mapping;
  double distance_ratio = 1.0;
  bool prepended_default_pose = false;
  bool appended_default_pose = false;
};

// Rewrites a stored program against a target scene and its conventions.
class MemoryAdapter {
 public:
  virtual ~MemoryAdapter() = default;
  virtual std::string name() const = 0;
  virtual AdaptationResult adapt(const SuccessLog& source, const EnvironmentProfile& source_env,
                                 const EnvironmentProfile& target_env,
                                 const std::string& target_instruction,
                                 const std::vector<std::string>& target_objects) = 0;
};

// Deterministic adapter:
//  - every referenced object is retargeted to the scene object with the
//    highest token overlap (names split on underscores; Jaccard on the token
//    sets; ties go to the shorter then lexicographically smaller name); a
//    reference no scene object overlaps raises NoMappableObjectError
//  - distances scale by target.unit_scale / source.unit_scale
//  - a default-pose opener is prepended when the target requires one, and a
//    default-pose trailer is appended when both conventions call for it
//  - the declaration (when present) is replaced by the target scene and the
//    query comment restates the target instruction
// Steps whose command did not change keep their original wording. Re-running
// the adapter on its own output is a fixed point when the distance ratio is 1.
class RuleBasedAdapter final : public MemoryAdapter {
 public:
  std::string name() const override { return "rule"; }
  AdaptationResult adapt(const SuccessLog& source, const EnvironmentProfile& source_env,
                         const EnvironmentProfile& target_env,
                         const std::string& target_instruction,
                         const std::vector<std::string>& target_objects) override;
};

// Delegates the rewrite to a completion provider via the adaptation prompt;
// the reply must contain a parseable program. Provider and extraction errors
// propagate to the caller.
class LlmAdapter final : public MemoryAdapter {
 public:
  LlmAdapter(CompletionProvider& provider, PromptTemplate templates)
      : provider_(provider), templates_(std::move(templates)) {}

  std::string name() const override { return "llm"; }
  AdaptationResult adapt(const SuccessLog& source, const EnvironmentProfile& source_env,
                         const EnvironmentProfile& target_env,
                         const std::string& target_instruction,
                         const std::vector<std::string>& target_objects) override;

 private:
  CompletionProvider& provider_;
  PromptTemplate templates_;
};

// The token-overlap retarget used by the rule adapter, exposed for tests and
// diagnostics. Throws NoMappableObjectError when nothing overlaps.
std::string map_object_name(const std::string& reference,
                            const std::vector<std::string>& scene_objects);

}  // namespace mtp
