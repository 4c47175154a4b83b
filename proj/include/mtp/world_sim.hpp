#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtp/composer_dsl.hpp"
#include "mtp/geometry.hpp"

namespace mtp {

// Deterministic kinematic tabletop: straight-line gripper motion, teleport
// grasps, an attachment rule (held objects ride the gripper) and simple
// release/settling semantics. Axis conventions: left/right map to -x/+x,
// forward/backward to +y/-y, up/down to +z/-z.

enum class NamingStyle { plain, suffixed };

struct EnvironmentProfile {
  std::string name;
  NamingStyle naming_style = NamingStyle::plain;
  // When set, precision relative moves drift unless the program opens with a
  // default-pose step; coarse destination moves are unaffected.
  bool requires_default_pose_init = false;
  Box workspace_bounds{{0, 0, 0}, {1, 1, 1}};
  double top_clearance = 0.10;   // height of "move to the top of X" above X
  Vec3 default_pose{0.5, 0.5, 0.4};
  double unit_scale = 1.0;       // relative size of distances quoted here
  bool default_pose_trailer = false;  // convention: plans end at default pose
};

struct SceneObject {
  std::string name;
  Vec3 position{};
  bool graspable = true;
  std::optional<double> container_radius;  // set for open-topped containers
  double yaw = 0.0;                        // degrees, changed by held rotation
  bool operator==(const SceneObject&) const = default;
};

// ── success predicates ────────────────────────────────────────────────────

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

struct PredAbove {       // a sits at least min_dz higher than b (z only)
  std::string object;
  std::string reference;
  double min_dz = 0.0;
};
struct PredInside {      // within the container's radius at its floor level
  std::string object;
  std::string container;
};
struct PredDisplacedAtLeast {  // |Δaxis| >= min with the requested sign
  std::string object;
  char axis = 'z';             // 'x' | 'y' | 'z'
  double min = 0.0;
  bool positive = true;
};
struct PredGripperOpen {};
struct PredHoldingNothing {};
struct PredYawChangedBy {  // |Δyaw - degrees| <= tolerance
  std::string object;
  double degrees = 0.0;
  double tolerance = 5.0;
};
struct PredAnd { std::vector<PredicatePtr> children; };
struct PredOr { std::vector<PredicatePtr> children; };
struct PredNot { PredicatePtr child; };
// True if the child holds at any point of the trace instead of only at the
// final state (the default for everything else).
struct PredEver { PredicatePtr child; };

struct Predicate {
  std::variant<PredAbove, PredInside, PredDisplacedAtLeast, PredGripperOpen, PredHoldingNothing,
               PredYawChangedBy, PredAnd, PredOr, PredNot, PredEver>
      node;
};

PredicatePtr make_predicate(Predicate p);

// ── task / state ──────────────────────────────────────────────────────────

struct TaskSpec {
  std::string id;
  std::string instruction;
  EnvironmentProfile environment;
  std::vector<SceneObject> initial_scene;
  PredicatePtr success;
  int max_steps = 20;
  std::vector<std::string> paraphrases;  // optional alternate phrasings

  std::vector<std::string> object_names() const;
};

enum class StepOutcome { ok, partial, failed_step };

const char* to_string(StepOutcome o);

struct TraceEntry {
  std::string command;  // the raw step text
  StepOutcome outcome = StepOutcome::ok;
  Vec3 gripper_position{};
  std::optional<std::string> holding;
};

struct WorldState {
  std::map<std::string, SceneObject> objects;          // name-keyed, deterministic order
  std::map<std::string, SceneObject> initial_objects;  // snapshot taken at reset
  Vec3 gripper_position{};
  bool gripper_open = true;
  std::optional<std::string> holding;
  double gripper_yaw = 0.0;
  bool at_default_pose = true;
  bool init_drift_active = false;  // set by execute_program, read by steps
  std::vector<TraceEntry> step_trace;
};

struct ExecuteOptions {
  bool unknown_hard_fail = false;  // abort the program on an Unknown step
};

struct ExecutionResult {
  bool success = false;
  WorldState final_state;
  std::vector<TraceEntry> trace;
  std::optional<std::string> failure_reason;
  // state after reset followed by state after each executed step; predicate
  // "ever" mode quantifies over these snapshots
  std::vector<WorldState> states;
};

// ── operations ────────────────────────────────────────────────────────────

// Fresh state for the task: objects at initial poses, gripper open at the
// profile default pose, empty trace. Throws InvalidTaskError when an object
// starts outside the workspace.
WorldState reset(const TaskSpec& task);

// Applies one command; records exactly one trace entry. Failed steps leave
// the state unchanged apart from the trace.
StepOutcome step(WorldState& state, const ComposerStep& s, const EnvironmentProfile& profile);

// reset + all steps (capped at max_steps) + predicate evaluation.
ExecutionResult execute_program(const PlannerProgram& program, const TaskSpec& task,
                                const ExecuteOptions& options = {});

// Evaluates a predicate against a single state (no trace quantification).
bool evaluate(const PredicatePtr& predicate, const WorldState& state);

// Evaluates with "ever" nodes quantified over the given snapshots; all other
// nodes look at the last snapshot.
bool evaluate_over(const PredicatePtr& predicate, const std::vector<WorldState>& states);

}  // namespace mtp
