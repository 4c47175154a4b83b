#include "mtp/suite.hpp"

#include <fstream>
#include <sstream>

#include "mtp/errors.hpp"

namespace mtp {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  throw ValidationError(where + ": " + why);
}

const json& require(const json& node, const char* key, const std::string& where) {
  auto it = node.find(key);
  if (it == node.end()) bad(where, std::string("missing \"") + key + "\"");
  return *it;
}

std::string require_string(const json& node, const char* key, const std::string& where) {
  const json& value = require(node, key, where);
  if (!value.is_string()) bad(where, std::string("\"") + key + "\" must be a string");
  return value.get<std::string>();
}

double require_number(const json& node, const char* key, const std::string& where) {
  const json& value = require(node, key, where);
  if (!value.is_number()) bad(where, std::string("\"") + key + "\" must be a number");
  return value.get<double>();
}

Vec3 parse_vec3(const json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 3) bad(where, "expected [x, y, z]");
  for (const auto& c : node)
    if (!c.is_number()) bad(where, "coordinates must be numbers");
  return Vec3{node[0].get<double>(), node[1].get<double>(), node[2].get<double>()};
}

NamingStyle parse_naming_style(const std::string& text, const std::string& where) {
  if (text == "plain") return NamingStyle::plain;
  if (text == "suffixed") return NamingStyle::suffixed;
  bad(where, "unknown naming_style \"" + text + "\"");
}

char parse_axis(const std::string& text, const std::string& where) {
  if (text == "x" || text == "y" || text == "z") return text[0];
  bad(where, "unknown axis \"" + text + "\"");
}

EnvironmentProfile parse_environment(const json& node, const std::string& where) {
  if (!node.is_object()) bad(where, "environment must be an object");
  EnvironmentProfile profile;
  profile.name = require_string(node, "name", where);
  if (node.contains("naming_style"))
    profile.naming_style = parse_naming_style(node["naming_style"].get<std::string>(), where);
  if (node.contains("requires_default_pose_init"))
    profile.requires_default_pose_init = node["requires_default_pose_init"].get<bool>();
  if (node.contains("default_pose_trailer"))
    profile.default_pose_trailer = node["default_pose_trailer"].get<bool>();
  if (node.contains("unit_scale")) {
    profile.unit_scale = node["unit_scale"].get<double>();
    if (profile.unit_scale <= 0.0) bad(where, "unit_scale must be positive");
  }
  if (node.contains("top_clearance")) profile.top_clearance = node["top_clearance"].get<double>();
  if (node.contains("default_pose"))
    profile.default_pose = parse_vec3(node["default_pose"], where + ".default_pose");
  if (node.contains("workspace_bounds")) {
    const json& bounds = node["workspace_bounds"];
    if (!bounds.is_object()) bad(where, "workspace_bounds must be an object");
    profile.workspace_bounds.min = parse_vec3(require(bounds, "min", where), where + ".workspace_bounds.min");
    profile.workspace_bounds.max = parse_vec3(require(bounds, "max", where), where + ".workspace_bounds.max");
  }
  return profile;
}

SceneObject parse_object(const json& node, const std::string& where) {
  if (!node.is_object()) bad(where, "object must be an object");
  SceneObject object;
  object.name = require_string(node, "name", where);
  object.position = parse_vec3(require(node, "position", where), where + ".position");
  if (node.contains("graspable")) object.graspable = node["graspable"].get<bool>();
  if (node.contains("container_radius")) {
    double radius = node["container_radius"].get<double>();
    if (radius <= 0.0) bad(where, "container_radius must be positive");
    object.container_radius = radius;
  }
  if (node.contains("yaw")) object.yaw = node["yaw"].get<double>();
  return object;
}

template <typename Node>
PredicatePtr wrap(Node node) {
  return make_predicate(Predicate{std::move(node)});
}

PredicatePtr parse_predicate_node(const json& node, const std::string& where);

std::vector<PredicatePtr> parse_children(const json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) bad(where, "expected a non-empty predicate array");
  std::vector<PredicatePtr> children;
  children.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i)
    children.push_back(parse_predicate_node(node[i], where + "[" + std::to_string(i) + "]"));
  return children;
}

PredicatePtr parse_predicate_node(const json& node, const std::string& where) {
  if (node.is_string()) {
    const std::string text = node.get<std::string>();
    if (text == "gripper_open") return wrap(PredGripperOpen{});
    if (text == "holding_nothing") return wrap(PredHoldingNothing{});
    bad(where, "unknown predicate \"" + text + "\"");
  }
  if (!node.is_object() || node.size() != 1)
    bad(where, "predicate must be a single-key object or a bare name");
  const std::string key = node.begin().key();
  const json& body = node.begin().value();
  if (key == "all") return wrap(PredAnd{parse_children(body, where + ".all")});
  if (key == "any") return wrap(PredOr{parse_children(body, where + ".any")});
  if (key == "not") return wrap(PredNot{parse_predicate_node(body, where + ".not")});
  if (key == "ever") return wrap(PredEver{parse_predicate_node(body, where + ".ever")});
  if (key == "above") {
    PredAbove above;
    above.object = require_string(body, "object", where + ".above");
    above.reference = require_string(body, "reference", where + ".above");
    above.min_dz = require_number(body, "min_dz", where + ".above");
    return wrap(above);
  }
  if (key == "inside") {
    PredInside inside;
    inside.object = require_string(body, "object", where + ".inside");
    inside.container = require_string(body, "container", where + ".inside");
    return wrap(inside);
  }
  if (key == "displaced") {
    PredDisplacedAtLeast displaced;
    displaced.object = require_string(body, "object", where + ".displaced");
    displaced.axis = parse_axis(require_string(body, "axis", where + ".displaced"), where + ".displaced");
    displaced.min = require_number(body, "min", where + ".displaced");
    if (body.contains("direction")) {
      const std::string direction = body["direction"].get<std::string>();
      if (direction == "positive")
        displaced.positive = true;
      else if (direction == "negative")
        displaced.positive = false;
      else
        bad(where + ".displaced", "direction must be \"positive\" or \"negative\"");
    }
    return wrap(displaced);
  }
  if (key == "gripper_open" || key == "holding_nothing") {
    if (!body.is_object() || !body.empty()) bad(where, "\"" + key + "\" takes no arguments");
    if (key == "gripper_open") return wrap(PredGripperOpen{});
    return wrap(PredHoldingNothing{});
  }
  if (key == "yaw_changed") {
    PredYawChangedBy yaw;
    yaw.object = require_string(body, "object", where + ".yaw_changed");
    yaw.degrees = require_number(body, "degrees", where + ".yaw_changed");
    if (body.contains("tolerance")) yaw.tolerance = body["tolerance"].get<double>();
    return wrap(yaw);
  }
  bad(where, "unknown predicate \"" + key + "\"");
}

TaskSpec parse_task(const json& node, const EnvironmentRegistry& environments,
                    const std::string& where) {
  if (!node.is_object()) bad(where, "task must be an object");
  TaskSpec task;
  task.id = require_string(node, "id", where);
  const std::string label = where + " (" + task.id + ")";
  const std::string environment_name = require_string(node, "environment", label);
  if (environments.find(environment_name) == nullptr)
    bad(label, "unknown environment \"" + environment_name + "\"");
  task.environment = environments.resolve(environment_name);
  task.instruction = require_string(node, "instruction", label);
  const json& objects = require(node, "objects", label);
  if (!objects.is_array() || objects.empty()) bad(label, "\"objects\" must be a non-empty array");
  for (std::size_t i = 0; i < objects.size(); ++i)
    task.initial_scene.push_back(parse_object(objects[i], label + ".objects[" + std::to_string(i) + "]"));
  task.success = parse_predicate_node(require(node, "success", label), label + ".success");
  if (node.contains("max_steps")) {
    int max_steps = node["max_steps"].get<int>();
    if (max_steps <= 0) bad(label, "max_steps must be positive");
    task.max_steps = max_steps;
  }
  if (node.contains("paraphrases")) {
    const json& paraphrases = node["paraphrases"];
    if (!paraphrases.is_array()) bad(label, "\"paraphrases\" must be an array");
    for (const auto& p : paraphrases) {
      if (!p.is_string()) bad(label, "paraphrases must be strings");
      task.paraphrases.push_back(p.get<std::string>());
    }
  }
  return task;
}

}  // namespace

const std::vector<std::string>& Suite::examples_for(const std::string& environment) const {
  static const std::vector<std::string> kNone;
  auto it = prompt_examples.find(environment);
  return it == prompt_examples.end() ? kNone : it->second;
}

PredicatePtr parse_predicate(const nlohmann::json& node) {
  return parse_predicate_node(node, "success");
}

Suite parse_suite_text(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ValidationError("suite: not valid JSON");
  if (!root.is_object()) throw ValidationError("suite: top level must be an object");

  Suite suite;
  suite.name = require_string(root, "name", "suite");

  const json& environments = require(root, "environments", "suite");
  if (!environments.is_array() || environments.empty())
    throw ValidationError("suite: \"environments\" must be a non-empty array");
  for (std::size_t i = 0; i < environments.size(); ++i) {
    const std::string where = "environment " + std::to_string(i);
    EnvironmentProfile profile = parse_environment(environments[i], where);
    if (suite.environments.find(profile.name) != nullptr)
      bad(where, "duplicate environment \"" + profile.name + "\"");
    if (environments[i].contains("prompt_examples")) {
      const json& examples = environments[i]["prompt_examples"];
      if (!examples.is_array()) bad(where, "\"prompt_examples\" must be an array");
      for (const auto& example : examples) {
        if (!example.is_string()) bad(where, "prompt examples must be strings");
        suite.prompt_examples[profile.name].push_back(example.get<std::string>());
      }
    }
    suite.environments.add(profile);
  }

  const json& tasks = require(root, "tasks", "suite");
  if (!tasks.is_array() || tasks.empty())
    throw ValidationError("suite: \"tasks\" must be a non-empty array");
  std::vector<std::string> seen_ids;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    TaskSpec task = parse_task(tasks[i], suite.environments, "task " + std::to_string(i));
    for (const auto& id : seen_ids)
      if (id == task.id) bad("task " + std::to_string(i), "duplicate task id \"" + task.id + "\"");
    seen_ids.push_back(task.id);
    suite.tasks.push_back(std::move(task));
  }
  return suite;
}

Suite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read suite file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_suite_text(buffer.str());
}

}  // namespace mtp
