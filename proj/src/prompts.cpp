#include "mtp/prompts.hpp"

#include <fstream>
#include <sstream>

#include "mtp/composer_dsl.hpp"
#include "mtp/errors.hpp"

namespace mtp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// Replaces every "{slot}"; an empty (or all-whitespace) value is a caller bug
// surfaced as UnfilledSlotError so half-filled prompts never reach a model.
std::string fill_slot(std::string body, const std::string& slot, const std::string& value) {
  if (trim(value).empty()) throw UnfilledSlotError(slot);
  const std::string needle = "{" + slot + "}";
  std::size_t pos = 0;
  while ((pos = body.find(needle, pos)) != std::string::npos) {
    body.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return body;
}

// Joins non-empty blocks with one blank line between them.
std::string join_blocks(const std::vector<std::string>& blocks) {
  std::string out;
  for (const auto& block : blocks) {
    const std::string t = trim(block);
    if (t.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += t;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read template file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool is_program_line(const std::string& line) {
  const std::string t = trim(line);
  if (t.empty()) return false;
  return t.rfind("objects", 0) == 0 || t.rfind("composer(", 0) == 0 || t[0] == '#';
}

bool try_parse(const std::string& text, std::string* out) {
  try {
    PlannerProgram program = parse_program(text);
    (void)program;
  } catch (const Error&) {
    return false;
  }
  *out = text;
  return true;
}

}  // namespace

PromptTemplate builtin_templates() {
  PromptTemplate t;
  t.preamble =
      "You control a robot arm through a composer(\"...\") API. A plan is a short\n"
      "program: an objects = [...] line naming the scene objects, a # Query: line\n"
      "restating the task, one composer(\"...\") call per motion, and a final # done\n"
      "line. Reply with exactly one complete program and nothing else.";
  t.generation =
      "## New task\n"
      "Write a program for the scene and query below.\n"
      "{objects}\n"
      "# Query: {instruction}";
  t.adaptation =
      "## Adaptation task\n"
      "This program succeeded in the {source_environment} environment:\n"
      "{code}\n"
      "Rewrite it for the {target_environment} environment and the query below.\n"
      "Keep the step structure; change object names and distances as the new\n"
      "scene requires, and use only objects from this list.\n"
      "{objects}\n"
      "# Query: {instruction}";
  t.replan =
      "## Re-planning task\n"
      "A similar task was previously solved with this program:\n"
      "{adapted_code}\n"
      "The last attempt failed; it executed this program:\n"
      "{failed_code}\n"
      "Write a corrected program for the query below.\n"
      "# Query: {instruction}";
  return t;
}

PromptTemplate load_templates(const std::string& directory) {
  PromptTemplate t;
  t.preamble = read_text_file(directory + "/preamble.txt");
  t.generation = read_text_file(directory + "/generation.txt");
  t.adaptation = read_text_file(directory + "/adaptation.txt");
  t.replan = read_text_file(directory + "/replan.txt");
  return t;
}

std::string render_object_list(const std::vector<std::string>& names) {
  std::string out = "objects = [";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += "'" + names[i] + "'";
  }
  out += "]";
  return out;
}

std::string build_generation_prompt(const PromptTemplate& templates,
                                    const std::vector<std::string>& examples,
                                    const std::string& instruction,
                                    const std::vector<std::string>& objects) {
  if (objects.empty()) throw UnfilledSlotError("objects");
  std::string body = fill_slot(templates.generation, "objects", render_object_list(objects));
  body = fill_slot(body, "instruction", instruction);

  std::vector<std::string> blocks = {templates.preamble};
  blocks.insert(blocks.end(), examples.begin(), examples.end());
  blocks.push_back(body);
  return join_blocks(blocks);
}

std::string build_adaptation_prompt(const PromptTemplate& templates, const SuccessLog& source,
                                    const std::string& target_environment,
                                    const std::string& instruction,
                                    const std::vector<std::string>& objects) {
  if (objects.empty()) throw UnfilledSlotError("objects");
  std::string body = fill_slot(templates.adaptation, "source_environment", source.environment);
  body = fill_slot(body, "target_environment", target_environment);
  body = fill_slot(body, "code", trim(source.code));
  body = fill_slot(body, "objects", render_object_list(objects));
  body = fill_slot(body, "instruction", instruction);
  return join_blocks({templates.preamble, body});
}

std::string build_replan_prompt(const PromptTemplate& templates,
                                const std::vector<std::string>& examples,
                                const std::string& instruction, const std::string& adapted_code,
                                const std::string& failed_code) {
  std::string body = fill_slot(templates.replan, "adapted_code", trim(adapted_code));
  body = fill_slot(body, "failed_code", trim(failed_code));
  body = fill_slot(body, "instruction", instruction);

  std::vector<std::string> blocks = {templates.preamble};
  blocks.insert(blocks.end(), examples.begin(), examples.end());
  blocks.push_back(body);
  return join_blocks(blocks);
}

std::string extract_program(const std::string& completion) {
  std::vector<std::string> lines;
  std::istringstream stream(completion);
  for (std::string line; std::getline(stream, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }

  // Fenced blocks first: models often wrap code in ``` fences.
  std::string candidate;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).rfind("```", 0) != 0) continue;
    std::string block;
    std::size_t j = i + 1;
    for (; j < lines.size() && trim(lines[j]).rfind("```", 0) != 0; ++j) block += lines[j] + "\n";
    if (j < lines.size() && try_parse(block, &candidate)) return candidate;
    i = j;  // skip past the closing fence (or the rest of the text)
  }

  // Otherwise: maximal runs of program-shaped lines that contain at least one
  // composer step.
  std::size_t i = 0;
  while (i < lines.size()) {
    if (!is_program_line(lines[i])) {
      ++i;
      continue;
    }
    std::string block;
    bool has_step = false;
    std::size_t j = i;
    for (; j < lines.size() && is_program_line(lines[j]); ++j) {
      block += trim(lines[j]) + "\n";
      if (trim(lines[j]).rfind("composer(", 0) == 0) has_step = true;
    }
    if (has_step && try_parse(block, &candidate)) return candidate;
    i = j;
  }

  throw NoProgramFoundError();
}

}  // namespace mtp
