#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mtp {

// Line-oriented planner programs: an optional `objects = [...]` declaration,
// an optional `# Query: ...` comment, one `composer("...")` call per step and
// an optional `# done` trailer. Step text is parsed into a closed command
// vocabulary; anything unrecognized becomes Unknown and is never guessed at.

enum class Direction { up, down, left, right, forward, backward };

enum class RotationSense { clockwise, counterclockwise, left, right };

enum class Region { none, center, top };

const char* to_string(Direction d);
const char* to_string(RotationSense s);

// Reference frame for relative moves.
struct GripperRef {
  bool operator==(const GripperRef&) const = default;
};
struct ObjectRef {
  std::string name;
  bool operator==(const ObjectRef&) const = default;
};
struct NoRef {
  bool operator==(const NoRef&) const = default;
};
using Reference = std::variant<GripperRef, ObjectRef, NoRef>;

// ── command variants ──────────────────────────────────────────────────────

struct Grasp {
  std::string object;
  bool operator==(const Grasp&) const = default;
};

struct OpenGripper {
  bool operator==(const OpenGripper&) const = default;
};

struct CloseGripper {
  bool operator==(const CloseGripper&) const = default;
};

struct MoveRelative {
  double distance = 0.0;  // meters, > 0
  Direction direction = Direction::up;
  Reference reference = NoRef{};
  bool operator==(const MoveRelative&) const = default;
};

struct Offset {
  Direction direction = Direction::up;
  double distance = 0.0;  // meters, > 0
  bool operator==(const Offset&) const = default;
};

struct MoveTo {
  std::string target;
  std::optional<Offset> offset;
  Region region = Region::none;
  bool operator==(const MoveTo&) const = default;
};

struct Rotate {
  double angle = 0.0;  // degrees, in (0, 360]
  RotationSense sense = RotationSense::counterclockwise;
  bool operator==(const Rotate&) const = default;
};

struct DefaultPose {
  bool operator==(const DefaultPose&) const = default;
};

struct MoveAwayFrom {
  std::string object;
  double distance = 0.0;  // meters, > 0
  bool operator==(const MoveAwayFrom&) const = default;
};

struct Unknown {
  std::string raw;
  bool operator==(const Unknown&) const = default;
};

using ComposerCommand = std::variant<Grasp, OpenGripper, CloseGripper, MoveRelative, MoveTo,
                                     Rotate, DefaultPose, MoveAwayFrom, Unknown>;

// One composer("...") call: the verbatim step text plus its parsed command.
struct ComposerStep {
  std::string raw;
  ComposerCommand command = Unknown{};
  bool operator==(const ComposerStep&) const = default;
};

struct PlannerProgram {
  std::vector<std::string> declared_objects;
  bool has_declaration = false;
  std::optional<std::string> query_comment;
  std::vector<ComposerStep> steps;
  bool done_trailer = false;
  bool operator==(const PlannerProgram&) const = default;
};

// ── scene validation ──────────────────────────────────────────────────────

enum class WarningKind { declared_object_missing, unknown_object_ref, unparsed_step };

struct Warning {
  WarningKind kind = WarningKind::unparsed_step;
  std::string subject;  // the object name or step text concerned
  std::string message;
};

// ── operations ────────────────────────────────────────────────────────────

// Total: any text maps to a command, falling back to Unknown. Never throws.
ComposerCommand parse_command(const std::string& raw);

// Throws SyntaxError for an unrecognizable line, EmptyProgramError when no
// composer step is present.
PlannerProgram parse_program(const std::string& text);

// Canonical surface: declaration with single quotes, `# Query:` comment,
// one composer("...") line per step, `# done` trailer, trailing newline.
std::string render_program(const PlannerProgram& program);

// Canonical step text for a command. Unknown renders as its raw text.
// render_command(cmd) always reparses to an equal command.
std::string render_command(const ComposerCommand& command);

// Strips trailing whitespace per line and drops blank lines; used by the
// render/parse round-trip guarantee.
std::string normalize_program_text(const std::string& text);

// Build a step from canonical text for `command`.
ComposerStep make_step(const ComposerCommand& command);

std::vector<Warning> validate_against_scene(const PlannerProgram& program,
                                            const std::vector<std::string>& scene_objects);

// Object names a command refers to (empty for commands without references).
std::vector<std::string> referenced_objects(const ComposerCommand& command);

}  // namespace mtp
