#include "mtp/composer_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "mtp/errors.hpp"

namespace mtp {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Lowercased whitespace tokens with trailing sentence punctuation removed.
std::vector<std::string> tokenize(const std::string& raw) {
  std::vector<std::string> out;
  std::istringstream in(lower(raw));
  std::string tok;
  while (in >> tok) {
    while (!tok.empty() && (tok.back() == '.' || tok.back() == ',' || tok.back() == ';')) {
      tok.pop_back();
    }
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

bool is_article(const std::string& t) { return t == "the" || t == "a" || t == "an"; }

// Join tokens[b..e) into an object reference, dropping a leading article.
std::optional<std::string> object_ref(const std::vector<std::string>& t, std::size_t b,
                                      std::size_t e) {
  if (b < e && is_article(t[b])) ++b;
  if (b >= e) return std::nullopt;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (!out.empty()) out += ' ';
    out += t[i];
  }
  return out;
}

std::optional<Direction> direction_word(const std::string& w) {
  if (w == "up" || w == "upward" || w == "upwards") return Direction::up;
  if (w == "down" || w == "downward" || w == "downwards") return Direction::down;
  if (w == "left") return Direction::left;
  if (w == "right") return Direction::right;
  if (w == "forward" || w == "forwards" || w == "ahead") return Direction::forward;
  if (w == "backward" || w == "backwards" || w == "back" || w == "behind")
    return Direction::backward;
  return std::nullopt;
}

// Offset words for "move to <dist> <word> (of) <object>".
std::optional<Direction> offset_word(const std::string& w) {
  if (w == "above" || w == "over") return Direction::up;
  if (w == "below" || w == "under" || w == "beneath") return Direction::down;
  return direction_word(w);
}

// Meters per unit expressed as a divisor so "17.5cm" -> 17.5 / 100.0 matches
// the arithmetic used everywhere else in the engine bit for bit.
std::optional<double> unit_divisor(const std::string& u) {
  if (u == "cm" || u == "centimeter" || u == "centimeters") return 100.0;
  if (u == "mm" || u == "millimeter" || u == "millimeters") return 1000.0;
  if (u == "m" || u == "meter" || u == "meters") return 1.0;
  return std::nullopt;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

// Parses a distance starting at tokens[i]; accepts "25cm" and "25 cm".
// Returns (meters, tokens consumed) for positive distances only.
std::optional<std::pair<double, std::size_t>> parse_distance(const std::vector<std::string>& t,
                                                             std::size_t i) {
  if (i >= t.size()) return std::nullopt;
  const std::string& first = t[i];
  std::size_t split = 0;
  while (split < first.size() &&
         (std::isdigit(static_cast<unsigned char>(first[split])) || first[split] == '.')) {
    ++split;
  }
  if (split == 0) return std::nullopt;
  auto value = parse_number(first.substr(0, split));
  if (!value || *value <= 0.0) return std::nullopt;
  if (split < first.size()) {  // unit glued to the number: "25cm"
    auto d = unit_divisor(first.substr(split));
    if (!d) return std::nullopt;
    return std::make_pair(*value / *d, std::size_t{1});
  }
  if (i + 1 >= t.size()) return std::nullopt;  // bare number: "25 cm"
  auto d = unit_divisor(t[i + 1]);
  if (!d) return std::nullopt;
  return std::make_pair(*value / *d, std::size_t{2});
}

// Parses "90 degrees" / "90degrees" starting at tokens[i].
std::optional<std::pair<double, std::size_t>> parse_angle(const std::vector<std::string>& t,
                                                          std::size_t i) {
  if (i >= t.size()) return std::nullopt;
  auto is_deg = [](const std::string& u) { return u == "degrees" || u == "degree" || u == "deg"; };
  const std::string& first = t[i];
  std::size_t split = 0;
  while (split < first.size() &&
         (std::isdigit(static_cast<unsigned char>(first[split])) || first[split] == '.')) {
    ++split;
  }
  if (split == 0) return std::nullopt;
  auto value = parse_number(first.substr(0, split));
  if (!value || *value <= 0.0 || *value > 360.0) return std::nullopt;
  if (split < first.size()) {
    if (!is_deg(first.substr(split))) return std::nullopt;
    return std::make_pair(*value, std::size_t{1});
  }
  if (i + 1 >= t.size() || !is_deg(t[i + 1])) return std::nullopt;
  return std::make_pair(*value, std::size_t{2});
}

std::optional<RotationSense> spin_word(const std::string& w) {
  if (w == "clockwise" || w == "cw") return RotationSense::clockwise;
  if (w == "counterclockwise" || w == "counter-clockwise" || w == "anticlockwise" || w == "ccw")
    return RotationSense::counterclockwise;
  return std::nullopt;
}

bool ends_with_default_pose(const std::vector<std::string>& t) {
  return t.size() >= 2 && t[t.size() - 2] == "default" && t.back() == "pose";
}

std::optional<ComposerCommand> try_gripper_toggle(const std::vector<std::string>& t) {
  auto is_form = [&](const std::string& verb) {
    return (t.size() == 2 && t[0] == verb && t[1] == "gripper") ||
           (t.size() == 3 && t[0] == verb && t[1] == "the" && t[2] == "gripper");
  };
  if (is_form("open")) return ComposerCommand{OpenGripper{}};
  if (is_form("close")) return ComposerCommand{CloseGripper{}};
  return std::nullopt;
}

std::optional<ComposerCommand> try_default_pose(const std::vector<std::string>& t) {
  if (!ends_with_default_pose(t)) return std::nullopt;
  if (t.size() == 2) return ComposerCommand{DefaultPose{}};
  static const std::set<std::string> starters{"back", "go", "return", "move", "reset"};
  if (starters.count(t[0])) return ComposerCommand{DefaultPose{}};
  return std::nullopt;
}

std::optional<ComposerCommand> try_grasp(const std::vector<std::string>& t) {
  std::size_t b = 0;
  if (!t.empty() && (t[0] == "grasp" || t[0] == "grab")) {
    b = 1;
  } else if (t.size() >= 2 && t[0] == "pick" && t[1] == "up") {
    b = 2;
  } else {
    return std::nullopt;
  }
  auto obj = object_ref(t, b, t.size());
  if (!obj) return std::nullopt;
  return ComposerCommand{Grasp{*obj}};
}

std::optional<ComposerCommand> try_move_away(const std::vector<std::string>& t) {
  if (t.size() < 5 || t[0] != "move" || t[1] != "away" || t[2] != "from") return std::nullopt;
  auto by = std::find(t.begin() + 3, t.end(), "by");
  if (by == t.end()) return std::nullopt;
  std::size_t by_i = static_cast<std::size_t>(by - t.begin());
  auto obj = object_ref(t, 3, by_i);
  if (!obj) return std::nullopt;
  auto dist = parse_distance(t, by_i + 1);
  if (!dist || by_i + 1 + dist->second != t.size()) return std::nullopt;
  return ComposerCommand{MoveAwayFrom{*obj, dist->first}};
}

std::optional<ComposerCommand> try_move_to(const std::vector<std::string>& t) {
  if (t.size() < 3 || t[0] != "move" || t[1] != "to") return std::nullopt;
  std::size_t i = 2;
  bool leading_article = i < t.size() && is_article(t[i]);
  // move to the top/center of X
  if (leading_article && i + 2 < t.size() && t[i + 2] == "of") {
    const std::string& region = t[i + 1];
    auto obj = object_ref(t, i + 3, t.size());
    if (obj) {
      if (region == "top") return ComposerCommand{MoveTo{*obj, std::nullopt, Region::top}};
      if (region == "center" || region == "centre" || region == "middle")
        return ComposerCommand{MoveTo{*obj, std::nullopt, Region::center}};
    }
  }
  if (!leading_article && i + 1 < t.size() && t[i + 1] == "of") {
    const std::string& region = t[i];
    auto obj = object_ref(t, i + 2, t.size());
    if (obj) {
      if (region == "top") return ComposerCommand{MoveTo{*obj, std::nullopt, Region::top}};
      if (region == "center" || region == "centre" || region == "middle")
        return ComposerCommand{MoveTo{*obj, std::nullopt, Region::center}};
    }
  }
  // move to <dist> <offset-word> (of) X
  if (auto dist = parse_distance(t, i)) {
    std::size_t j = i + dist->second;
    if (j < t.size()) {
      if (auto dir = offset_word(t[j])) {
        std::size_t k = j + 1;
        if (k < t.size() && t[k] == "of") ++k;
        auto obj = object_ref(t, k, t.size());
        if (obj) return ComposerCommand{MoveTo{*obj, Offset{*dir, dist->first}, Region::none}};
      }
    }
    return std::nullopt;  // distance without a landing spot
  }
  // plain: move to the X
  auto obj = object_ref(t, i, t.size());
  if (!obj) return std::nullopt;
  return ComposerCommand{MoveTo{*obj, std::nullopt, Region::none}};
}

std::optional<ComposerCommand> try_move_relative(const std::vector<std::string>& t) {
  if (t.empty() || t[0] != "move") return std::nullopt;
  std::size_t i = 1;
  Reference ref = NoRef{};
  bool gripper_prefix = false;
  if (i < t.size() && t[i] == "gripper") {  // move gripper 10cm up
    gripper_prefix = true;
    ++i;
  } else if (i + 1 < t.size() && t[i] == "the" && t[i + 1] == "gripper") {
    gripper_prefix = true;
    i += 2;
  }
  auto dist = parse_distance(t, i);
  if (!dist) return std::nullopt;
  i += dist->second;
  if (i >= t.size()) return std::nullopt;
  auto dir = direction_word(t[i]);
  if (!dir) return std::nullopt;
  ++i;
  if (gripper_prefix) {
    if (i != t.size()) return std::nullopt;
    return ComposerCommand{MoveRelative{dist->first, *dir, GripperRef{}}};
  }
  if (i == t.size()) return ComposerCommand{MoveRelative{dist->first, *dir, NoRef{}}};
  if (t[i] != "from") return std::nullopt;
  ++i;
  std::size_t b = i;
  if (b < t.size() && is_article(t[b])) ++b;
  if (b < t.size() && t[b] == "gripper" && b + 1 == t.size()) {
    return ComposerCommand{MoveRelative{dist->first, *dir, GripperRef{}}};
  }
  auto obj = object_ref(t, i, t.size());
  if (!obj) return std::nullopt;
  return ComposerCommand{MoveRelative{dist->first, *dir, ObjectRef{*obj}}};
}

std::optional<ComposerCommand> try_rotate(const std::vector<std::string>& t) {
  if (t.empty() || (t[0] != "rotate" && t[0] != "turn")) return std::nullopt;
  std::size_t i = 1;
  if (i < t.size() && t[i] == "the") ++i;
  // rotate the gripper to the left/right
  if (i < t.size() && t[i] == "gripper") {
    ++i;
    if (i < t.size() && t[i] == "to") ++i;
    if (i < t.size() && t[i] == "the") ++i;
    if (i + 1 == t.size()) {
      if (t[i] == "left") return ComposerCommand{Rotate{90.0, RotationSense::left}};
      if (t[i] == "right") return ComposerCommand{Rotate{90.0, RotationSense::right}};
    }
    return std::nullopt;
  }
  // turn counterclockwise by 90 degrees / turn left by 45 degrees
  std::optional<RotationSense> sense;
  if (i < t.size()) {
    if (auto s = spin_word(t[i])) {
      sense = *s;
    } else if (t[i] == "left") {
      sense = RotationSense::left;
    } else if (t[i] == "right") {
      sense = RotationSense::right;
    }
  }
  if (sense) {
    ++i;
    if (i < t.size() && t[i] == "by") ++i;
    auto angle = parse_angle(t, i);
    if (angle && i + angle->second == t.size())
      return ComposerCommand{Rotate{angle->first, *sense}};
    return std::nullopt;
  }
  // turn by 90 degrees clockwise
  if (i < t.size() && t[i] == "by") ++i;
  auto angle = parse_angle(t, i);
  if (!angle) return std::nullopt;
  i += angle->second;
  if (i + 1 == t.size()) {
    if (auto s = spin_word(t[i])) return ComposerCommand{Rotate{angle->first, *s}};
    if (t[i] == "left") return ComposerCommand{Rotate{angle->first, RotationSense::left}};
    if (t[i] == "right") return ComposerCommand{Rotate{angle->first, RotationSense::right}};
  }
  return std::nullopt;
}

// Formats meters as centimeters ("25cm", "2.5cm").
std::string format_cm(double meters) {
  double cm = meters * 100.0;
  double rounded = std::round(cm);
  char buf[32];
  if (std::abs(cm - rounded) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", rounded);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g", cm);
  }
  return std::string(buf) + "cm";
}

std::string format_angle(double degrees) {
  double rounded = std::round(degrees);
  char buf[32];
  if (std::abs(degrees - rounded) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", rounded);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g", degrees);
  }
  return buf;
}

}  // namespace

const char* to_string(Direction d) {
  switch (d) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::left: return "left";
    case Direction::right: return "right";
    case Direction::forward: return "forward";
    case Direction::backward: return "backward";
  }
  return "up";
}

const char* to_string(RotationSense s) {
  switch (s) {
    case RotationSense::clockwise: return "clockwise";
    case RotationSense::counterclockwise: return "counterclockwise";
    case RotationSense::left: return "left";
    case RotationSense::right: return "right";
  }
  return "clockwise";
}

ComposerCommand parse_command(const std::string& raw) {
  const std::vector<std::string> t = tokenize(raw);
  if (t.empty()) return Unknown{raw};
  if (auto c = try_gripper_toggle(t)) return *c;
  if (auto c = try_default_pose(t)) return *c;
  if (auto c = try_grasp(t)) return *c;
  if (auto c = try_move_away(t)) return *c;
  if (auto c = try_rotate(t)) return *c;
  if (t[0] == "move") {
    // Relative moves take precedence so "move 5cm up" is not read as a
    // destination; "move to ..." forms never start with a distance.
    if (auto c = try_move_relative(t)) return *c;
    if (auto c = try_move_to(t)) return *c;
  }
  return Unknown{raw};
}

PlannerProgram parse_program(const std::string& text) {
  PlannerProgram program;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = strip(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      std::string body = strip(s.substr(1));
      std::string low = lower(body);
      if (low.rfind("query:", 0) == 0) {
        if (!program.query_comment) program.query_comment = strip(body.substr(6));
      } else if (low == "done") {
        program.done_trailer = true;
      }
      continue;  // other comments are tolerated and dropped
    }
    if (s.rfind("objects", 0) == 0) {
      if (program.has_declaration) throw SyntaxError(line_no, "duplicate objects declaration");
      std::size_t i = 7;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size() || s[i] != '=') throw SyntaxError(line_no, "expected '=' after objects");
      ++i;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size() || s[i] != '[') throw SyntaxError(line_no, "expected '[' in declaration");
      ++i;
      program.has_declaration = true;
      bool closed = false;
      while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
        if (i < s.size() && s[i] == ']') {
          closed = true;
          ++i;
          break;
        }
        if (i >= s.size() || (s[i] != '\'' && s[i] != '"'))
          throw SyntaxError(line_no, "expected quoted object name");
        char quote = s[i];
        std::size_t end = s.find(quote, i + 1);
        if (end == std::string::npos) throw SyntaxError(line_no, "unterminated object name");
        program.declared_objects.push_back(s.substr(i + 1, end - i - 1));
        i = end + 1;
      }
      if (!closed) throw SyntaxError(line_no, "unterminated objects declaration");
      if (!strip(s.substr(i)).empty())
        throw SyntaxError(line_no, "trailing text after declaration");
      continue;
    }
    if (s.rfind("composer", 0) == 0) {
      std::size_t i = 8;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size() || s[i] != '(') throw SyntaxError(line_no, "expected '(' after composer");
      ++i;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size() || (s[i] != '"' && s[i] != '\''))
        throw SyntaxError(line_no, "expected quoted step text");
      char quote = s[i];
      std::size_t end = s.find(quote, i + 1);
      if (end == std::string::npos) throw SyntaxError(line_no, "unterminated step text");
      std::string raw = s.substr(i + 1, end - i - 1);
      if (strip(raw).empty()) throw SyntaxError(line_no, "empty composer step");
      i = end + 1;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size() || s[i] != ')') throw SyntaxError(line_no, "expected ')'");
      if (!strip(s.substr(i + 1)).empty())
        throw SyntaxError(line_no, "trailing text after composer call");
      program.steps.push_back(ComposerStep{raw, parse_command(raw)});
      continue;
    }
    throw SyntaxError(line_no, "unrecognized line: " + s);
  }
  if (program.steps.empty()) throw EmptyProgramError();
  return program;
}

std::string render_program(const PlannerProgram& program) {
  std::string out;
  if (program.has_declaration) {
    out += "objects = [";
    for (std::size_t i = 0; i < program.declared_objects.size(); ++i) {
      if (i) out += ", ";
      out += "'" + program.declared_objects[i] + "'";
    }
    out += "]\n";
  }
  if (program.query_comment) out += "# Query: " + *program.query_comment + "\n";
  for (const auto& step : program.steps) out += "composer(\"" + step.raw + "\")\n";
  if (program.done_trailer) out += "# done\n";
  return out;
}

std::string render_command(const ComposerCommand& command) {
  struct Renderer {
    std::string operator()(const Grasp& c) const { return "grasp the " + c.object; }
    std::string operator()(const OpenGripper&) const { return "open gripper"; }
    std::string operator()(const CloseGripper&) const { return "close gripper"; }
    std::string operator()(const MoveRelative& c) const {
      std::string base = format_cm(c.distance) + " " + to_string(c.direction);
      if (std::holds_alternative<GripperRef>(c.reference)) return "move gripper " + base;
      if (const auto* o = std::get_if<ObjectRef>(&c.reference))
        return "move " + base + " from the " + o->name;
      return "move " + base;
    }
    std::string operator()(const MoveTo& c) const {
      if (c.region == Region::top) return "move to the top of the " + c.target;
      if (c.region == Region::center) return "move to the center of the " + c.target;
      if (c.offset) {
        const Offset& off = *c.offset;
        std::string d = format_cm(off.distance);
        if (off.direction == Direction::up) return "move to " + d + " above the " + c.target;
        if (off.direction == Direction::down) return "move to " + d + " below the " + c.target;
        return "move to " + d + " " + to_string(off.direction) + " of the " + c.target;
      }
      return "move to the " + c.target;
    }
    std::string operator()(const Rotate& c) const {
      if (c.sense == RotationSense::left || c.sense == RotationSense::right)
        return std::string("rotate the gripper to the ") + to_string(c.sense);
      return std::string("turn ") + to_string(c.sense) + " by " + format_angle(c.angle) +
             " degrees";
    }
    std::string operator()(const DefaultPose&) const { return "back to default pose"; }
    std::string operator()(const MoveAwayFrom& c) const {
      return "move away from the " + c.object + " by " + format_cm(c.distance);
    }
    std::string operator()(const Unknown& c) const { return c.raw; }
  };
  return std::visit(Renderer{}, command);
}

std::string normalize_program_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    std::size_t e = line.find_last_not_of(" \t\r");
    if (e == std::string::npos) continue;  // blank line
    std::size_t b = line.find_first_not_of(" \t");
    out += line.substr(b, e - b + 1);
    out += '\n';
  }
  return out;
}

ComposerStep make_step(const ComposerCommand& command) {
  return ComposerStep{render_command(command), command};
}

std::vector<std::string> referenced_objects(const ComposerCommand& command) {
  struct Refs {
    std::vector<std::string> operator()(const Grasp& c) const { return {c.object}; }
    std::vector<std::string> operator()(const OpenGripper&) const { return {}; }
    std::vector<std::string> operator()(const CloseGripper&) const { return {}; }
    std::vector<std::string> operator()(const MoveRelative& c) const {
      if (const auto* o = std::get_if<ObjectRef>(&c.reference)) return {o->name};
      return {};
    }
    std::vector<std::string> operator()(const MoveTo& c) const { return {c.target}; }
    std::vector<std::string> operator()(const Rotate&) const { return {}; }
    std::vector<std::string> operator()(const DefaultPose&) const { return {}; }
    std::vector<std::string> operator()(const MoveAwayFrom& c) const { return {c.object}; }
    std::vector<std::string> operator()(const Unknown&) const { return {}; }
  };
  return std::visit(Refs{}, command);
}

std::vector<Warning> validate_against_scene(const PlannerProgram& program,
                                            const std::vector<std::string>& scene_objects) {
  std::vector<Warning> warnings;
  const std::set<std::string> scene(scene_objects.begin(), scene_objects.end());
  for (const auto& name : program.declared_objects) {
    if (!scene.count(name)) {
      warnings.push_back({WarningKind::declared_object_missing, name,
                          "declared object not in scene: " + name});
    }
  }
  for (const auto& step : program.steps) {
    if (std::holds_alternative<Unknown>(step.command)) {
      warnings.push_back({WarningKind::unparsed_step, step.raw, "unparsed step: " + step.raw});
      continue;
    }
    for (const auto& ref : referenced_objects(step.command)) {
      if (!scene.count(ref)) {
        warnings.push_back({WarningKind::unknown_object_ref, ref,
                            "step references object not in scene: " + ref});
      }
    }
  }
  return warnings;
}

}  // namespace mtp
