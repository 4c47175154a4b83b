#include "mtp/world_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtp/errors.hpp"

namespace mtp {

namespace {

constexpr double kGrabReach = 0.02;       // close-gripper pickup radius
constexpr double kSettleTolerance = 0.05; // max height error for "inside"
constexpr double kInitDrift = 0.05;       // sag per uninitialised precision move
constexpr double kEps = 1e-9;

Vec3 axis_vector(Direction d) {
  switch (d) {
    case Direction::left: return {-1, 0, 0};
    case Direction::right: return {1, 0, 0};
    case Direction::forward: return {0, 1, 0};
    case Direction::backward: return {0, -1, 0};
    case Direction::up: return {0, 0, 1};
    case Direction::down: return {0, 0, -1};
  }
  return {0, 0, 0};
}

SceneObject* find_object(WorldState& state, const std::string& name) {
  auto it = state.objects.find(name);
  return it == state.objects.end() ? nullptr : &it->second;
}

const SceneObject* find_object(const WorldState& state, const std::string& name) {
  auto it = state.objects.find(name);
  return it == state.objects.end() ? nullptr : &it->second;
}

// Moves the gripper (and whatever it holds) to `target`, clamped to the
// workspace. Returns partial when clamping changed the destination.
StepOutcome move_gripper(WorldState& state, const EnvironmentProfile& profile, Vec3 target) {
  const Vec3 clamped = profile.workspace_bounds.clamp(target);
  state.gripper_position = clamped;
  if (state.holding) {
    if (SceneObject* held = find_object(state, *state.holding)) held->position = clamped;
  }
  state.at_default_pose = false;
  return clamped == target ? StepOutcome::ok : StepOutcome::partial;
}

// Drops the held object: it lands on a container floor when released within
// the container footprint from at least floor height, otherwise on the table.
void settle_held(WorldState& state) {
  if (!state.holding) return;
  SceneObject* held = find_object(state, *state.holding);
  state.holding.reset();
  if (!held) return;

  const SceneObject* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& [name, obj] : state.objects) {
    if (name == held->name || !obj.container_radius) continue;
    const double dist = horizontal_distance(state.gripper_position, obj.position);
    if (dist <= *obj.container_radius + kEps && state.gripper_position.z >= obj.position.z - kEps &&
        dist < best_dist) {
      best = &obj;
      best_dist = dist;
    }
  }
  held->position.x = state.gripper_position.x;
  held->position.y = state.gripper_position.y;
  held->position.z = best ? best->position.z : 0.0;
}

struct StepVisitor {
  WorldState& state;
  const EnvironmentProfile& profile;

  StepOutcome operator()(const Grasp& c) {
    SceneObject* obj = find_object(state, c.object);
    if (!obj || !obj->graspable) return StepOutcome::failed_step;
    if (state.holding) settle_held(state);
    state.gripper_position = profile.workspace_bounds.clamp(obj->position);
    obj->position = state.gripper_position;
    state.gripper_open = false;
    state.holding = obj->name;
    state.at_default_pose = false;
    return StepOutcome::ok;
  }

  StepOutcome operator()(const OpenGripper&) {
    state.gripper_open = true;
    settle_held(state);
    return StepOutcome::ok;
  }

  StepOutcome operator()(const CloseGripper&) {
    state.gripper_open = false;
    if (state.holding) return StepOutcome::ok;
    std::string best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& [name, obj] : state.objects) {
      if (!obj.graspable) continue;
      const double dist = norm(obj.position - state.gripper_position);
      if (dist > kGrabReach + kEps) continue;
      if (dist < best_dist) {  // map order resolves exact ties to the lower name
        best = name;
        best_dist = dist;
      }
    }
    if (!best.empty()) {
      state.holding = best;
      find_object(state, best)->position = state.gripper_position;  // fingers center the object
    }
    return StepOutcome::ok;
  }

  StepOutcome operator()(const MoveRelative& c) {
    Vec3 origin = state.gripper_position;
    if (const auto* ref = std::get_if<ObjectRef>(&c.reference)) {
      const SceneObject* obj = find_object(state, ref->name);
      if (!obj) return StepOutcome::failed_step;
      origin = obj->position;
    }
    Vec3 target = origin + axis_vector(c.direction) * c.distance;
    if (state.init_drift_active) target.z -= kInitDrift;
    return move_gripper(state, profile, target);
  }

  StepOutcome operator()(const MoveTo& c) {
    const SceneObject* obj = find_object(state, c.target);
    if (!obj) return StepOutcome::failed_step;
    Vec3 target = obj->position;
    if (c.region == Region::top) target.z += profile.top_clearance;
    if (c.offset) target = target + axis_vector(c.offset->direction) * c.offset->distance;
    return move_gripper(state, profile, target);
  }

  StepOutcome operator()(const Rotate& c) {
    const double signed_angle =
        (c.sense == RotationSense::clockwise || c.sense == RotationSense::right) ? -c.angle
                                                                                 : c.angle;
    state.gripper_yaw += signed_angle;
    if (state.holding) {
      if (SceneObject* held = find_object(state, *state.holding)) held->yaw += signed_angle;
    }
    return StepOutcome::ok;
  }

  StepOutcome operator()(const DefaultPose&) {
    const StepOutcome out = move_gripper(state, profile, profile.default_pose);
    state.at_default_pose = true;
    return out;
  }

  StepOutcome operator()(const MoveAwayFrom& c) {
    const SceneObject* obj = find_object(state, c.object);
    if (!obj) return StepOutcome::failed_step;
    Vec3 away = state.gripper_position - obj->position;
    const double len = norm(away);
    if (len < kEps) away = {0, 0, 1};  // coincident: retreat straight up
    else away = away * (1.0 / len);
    return move_gripper(state, profile, state.gripper_position + away * c.distance);
  }

  StepOutcome operator()(const Unknown&) { return StepOutcome::failed_step; }
};

}  // namespace

const char* to_string(StepOutcome o) {
  switch (o) {
    case StepOutcome::ok: return "ok";
    case StepOutcome::partial: return "partial";
    case StepOutcome::failed_step: return "failed_step";
  }
  return "?";
}

PredicatePtr make_predicate(Predicate p) { return std::make_shared<const Predicate>(std::move(p)); }

std::vector<std::string> TaskSpec::object_names() const {
  std::vector<std::string> names;
  names.reserve(initial_scene.size());
  for (const auto& obj : initial_scene) names.push_back(obj.name);
  return names;
}

WorldState reset(const TaskSpec& task) {
  WorldState state;
  for (const auto& obj : task.initial_scene) {
    if (obj.name.empty()) throw InvalidTaskError("scene object with empty name");
    if (!task.environment.workspace_bounds.contains(obj.position))
      throw InvalidTaskError("object '" + obj.name + "' starts outside the workspace");
    if (!state.objects.emplace(obj.name, obj).second)
      throw InvalidTaskError("duplicate scene object '" + obj.name + "'");
  }
  state.initial_objects = state.objects;
  state.gripper_position = task.environment.workspace_bounds.clamp(task.environment.default_pose);
  state.gripper_open = true;
  state.at_default_pose = true;
  return state;
}

StepOutcome step(WorldState& state, const ComposerStep& s, const EnvironmentProfile& profile) {
  const StepOutcome outcome = std::visit(StepVisitor{state, profile}, s.command);
  state.step_trace.push_back(
      TraceEntry{s.raw, outcome, state.gripper_position, state.holding});
  return outcome;
}

ExecutionResult execute_program(const PlannerProgram& program, const TaskSpec& task,
                                const ExecuteOptions& options) {
  ExecutionResult result;
  result.final_state = reset(task);
  if (program.steps.empty()) {
    result.failure_reason = "no steps";
    result.states.push_back(result.final_state);
    return result;
  }

  WorldState& state = result.final_state;
  state.init_drift_active = task.environment.requires_default_pose_init &&
                            !std::holds_alternative<DefaultPose>(program.steps.front().command);
  result.states.push_back(state);

  const std::size_t limit =
      std::min(program.steps.size(), static_cast<std::size_t>(std::max(task.max_steps, 0)));
  for (std::size_t i = 0; i < limit; ++i) {
    const ComposerStep& s = program.steps[i];
    const StepOutcome outcome = step(state, s, task.environment);
    result.states.push_back(state);
    if (outcome == StepOutcome::failed_step && options.unknown_hard_fail &&
        std::holds_alternative<Unknown>(s.command)) {
      result.trace = state.step_trace;
      result.failure_reason = "unparsable step: " + s.raw;
      return result;
    }
  }

  result.trace = state.step_trace;
  result.success = task.success ? evaluate_over(task.success, result.states) : false;
  if (!result.success && !result.failure_reason) {
    result.failure_reason = task.success ? "goal not reached" : "no goal predicate";
  }
  return result;
}

namespace {

struct EvalVisitor {
  const WorldState& state;
  const std::vector<WorldState>* trace;  // null: single-state evaluation

  bool eval(const PredicatePtr& p, const WorldState& s) const {
    if (!p) return false;
    return std::visit(EvalVisitor{s, nullptr}, p->node);
  }
  bool eval_here(const PredicatePtr& p) const {
    if (!p) return false;
    return std::visit(EvalVisitor{state, trace}, p->node);
  }

  bool operator()(const PredAbove& p) const {
    const SceneObject* a = find_object(state, p.object);
    const SceneObject* b = find_object(state, p.reference);
    if (!a || !b) return false;
    return a->position.z - b->position.z >= p.min_dz - kEps;
  }

  bool operator()(const PredInside& p) const {
    const SceneObject* a = find_object(state, p.object);
    const SceneObject* c = find_object(state, p.container);
    if (!a || !c || !c->container_radius) return false;
    return horizontal_distance(a->position, c->position) <= *c->container_radius + kEps &&
           std::abs(a->position.z - c->position.z) <= kSettleTolerance + kEps;
  }

  bool operator()(const PredDisplacedAtLeast& p) const {
    const SceneObject* now = find_object(state, p.object);
    auto it = state.initial_objects.find(p.object);
    if (!now || it == state.initial_objects.end()) return false;
    auto component = [&](const Vec3& v) {
      return p.axis == 'x' ? v.x : p.axis == 'y' ? v.y : v.z;
    };
    const double delta = component(now->position) - component(it->second.position);
    return (p.positive ? delta : -delta) >= p.min - kEps;
  }

  bool operator()(const PredGripperOpen&) const { return state.gripper_open; }

  bool operator()(const PredHoldingNothing&) const { return !state.holding.has_value(); }

  bool operator()(const PredYawChangedBy& p) const {
    const SceneObject* now = find_object(state, p.object);
    auto it = state.initial_objects.find(p.object);
    if (!now || it == state.initial_objects.end()) return false;
    const double delta = std::abs(now->yaw - it->second.yaw);
    return std::abs(delta - p.degrees) <= p.tolerance + kEps;
  }

  bool operator()(const PredAnd& p) const {
    return std::all_of(p.children.begin(), p.children.end(),
                       [&](const PredicatePtr& c) { return eval_here(c); });
  }

  bool operator()(const PredOr& p) const {
    return std::any_of(p.children.begin(), p.children.end(),
                       [&](const PredicatePtr& c) { return eval_here(c); });
  }

  bool operator()(const PredNot& p) const { return !eval_here(p.child); }

  bool operator()(const PredEver& p) const {
    if (!trace) return eval(p.child, state);  // single state: degenerate "ever"
    return std::any_of(trace->begin(), trace->end(),
                       [&](const WorldState& s) { return eval(p.child, s); });
  }
};

}  // namespace

bool evaluate(const PredicatePtr& predicate, const WorldState& state) {
  if (!predicate) return false;
  return std::visit(EvalVisitor{state, nullptr}, predicate->node);
}

bool evaluate_over(const PredicatePtr& predicate, const std::vector<WorldState>& states) {
  if (!predicate || states.empty()) return false;
  return std::visit(EvalVisitor{states.back(), &states}, predicate->node);
}

}  // namespace mtp
