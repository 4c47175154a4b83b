#include "mtp/adaptation.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "mtp/errors.hpp"

namespace mtp {

namespace {

std::set<std::string> name_tokens(const std::string& name) {
  std::set<std::string> tokens;
  std::string current;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.insert(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.insert(current);
  return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : a) common += b.count(t);
  const std::size_t unioned = a.size() + b.size() - common;
  return unioned == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(unioned);
}

// Applies the object mapping and distance ratio to one command. Returns the
// possibly changed command; equality with the input decides whether the step
// keeps its original wording.
struct CommandRewriter {
  const std::map<std::string, std::string>& mapping;
  double ratio;

  std::string mapped(const std::string& name) const {
    auto it = mapping.find(name);
    return it == mapping.end() ? name : it->second;
  }
  double scaled(double distance) const { return distance * ratio; }

  ComposerCommand operator()(const Grasp& c) const { return Grasp{mapped(c.object)}; }
  ComposerCommand operator()(const OpenGripper& c) const { return c; }
  ComposerCommand operator()(const CloseGripper& c) const { return c; }
  ComposerCommand operator()(const MoveRelative& c) const {
    MoveRelative out = c;
    out.distance = scaled(c.distance);
    if (const auto* ref = std::get_if<ObjectRef>(&c.reference)) out.reference = ObjectRef{mapped(ref->name)};
    return out;
  }
  ComposerCommand operator()(const MoveTo& c) const {
    MoveTo out = c;
    out.target = mapped(c.target);
    if (c.offset) out.offset = Offset{c.offset->direction, scaled(c.offset->distance)};
    return out;
  }
  ComposerCommand operator()(const Rotate& c) const { return c; }
  ComposerCommand operator()(const DefaultPose& c) const { return c; }
  ComposerCommand operator()(const MoveAwayFrom& c) const {
    return MoveAwayFrom{mapped(c.object), scaled(c.distance)};
  }
  ComposerCommand operator()(const Unknown& c) const { return c; }
};

}  // namespace

std::string map_object_name(const std::string& reference,
                            const std::vector<std::string>& scene_objects) {
  const std::set<std::string> ref_tokens = name_tokens(reference);
  std::string best;
  double best_score = 0.0;
  for (const auto& candidate : scene_objects) {
    const double score = jaccard(ref_tokens, name_tokens(candidate));
    if (score <= 0.0) continue;
    const bool wins = best.empty() || score > best_score ||
                      (score == best_score && (candidate.size() < best.size() ||
                                               (candidate.size() == best.size() && candidate < best)));
    if (wins) {
      best = candidate;
      best_score = score;
    }
  }
  if (best.empty()) throw NoMappableObjectError(reference);
  return best;
}

AdaptationResult RuleBasedAdapter::adapt(const SuccessLog& source,
                                         const EnvironmentProfile& source_env,
                                         const EnvironmentProfile& target_env,
                                         const std::string& target_instruction,
                                         const std::vector<std::string>& target_objects) {
  PlannerProgram program = parse_program(source.code);

  AdaptationResult result;
  result.distance_ratio = target_env.unit_scale / source_env.unit_scale;

  // Resolve every referenced object once so repeated references agree.
  for (const auto& step : program.steps) {
    for (const auto& name : referenced_objects(step.command)) {
      if (!result.object_mapping.count(name)) {
        result.object_mapping[name] = map_object_name(name, target_objects);
      }
    }
  }

  const CommandRewriter rewrite{result.object_mapping, result.distance_ratio};
  for (auto& step : program.steps) {
    const ComposerCommand updated = std::visit(rewrite, step.command);
    if (!(updated == step.command)) {
      step.command = updated;
      step.raw = render_command(updated);  // changed steps get canonical wording
    }
  }

  if (target_env.requires_default_pose_init &&
      (program.steps.empty() || !std::holds_alternative<DefaultPose>(program.steps.front().command))) {
    program.steps.insert(program.steps.begin(), make_step(DefaultPose{}));
    result.prepended_default_pose = true;
  }
  if (source_env.default_pose_trailer && target_env.default_pose_trailer &&
      (program.steps.empty() || !std::holds_alternative<DefaultPose>(program.steps.back().command))) {
    program.steps.push_back(make_step(DefaultPose{}));
    result.appended_default_pose = true;
  }

  if (program.has_declaration) program.declared_objects = target_objects;
  program.query_comment = target_instruction;

  result.program = std::move(program);
  result.code = render_program(result.program);
  return result;
}

AdaptationResult LlmAdapter::adapt(const SuccessLog& source, const EnvironmentProfile& source_env,
                                   const EnvironmentProfile& target_env,
                                   const std::string& target_instruction,
                                   const std::vector<std::string>& target_objects) {
  const std::string prompt = build_adaptation_prompt(templates_, source, target_env.name,
                                                     target_instruction, target_objects);
  const std::string completion = provider_.complete(prompt);

  AdaptationResult result;
  result.distance_ratio = target_env.unit_scale / source_env.unit_scale;
  result.code = extract_program(completion);
  result.program = parse_program(result.code);
  return result;
}

}  // namespace mtp
