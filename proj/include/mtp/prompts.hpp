#pragma once

#include <string>
#include <vector>

#include "mtp/memory_store.hpp"

namespace mtp {

// Prompt templates for the three planner calls: writing a fresh program,
// rewriting a stored program for a new scene and correcting a failed attempt.
// Bodies contain {slot} placeholders; builders fill them and refuse to send a
// prompt with a required slot left empty.
struct PromptTemplate {
  std::string preamble;    // role + output-format contract, shared by all calls
  std::string generation;  // slots: {objects} {instruction}
  std::string adaptation;  // slots: {source_environment} {target_environment}
                           //        {code} {objects} {instruction}
  std::string replan;      // slots: {adapted_code} {failed_code} {instruction}
};

// The compiled-in default wording.
PromptTemplate builtin_templates();

// Reads preamble.txt, generation.txt, adaptation.txt and replan.txt from a
// directory. Throws IoError when a file is missing or unreadable.
PromptTemplate load_templates(const std::string& directory);

// "objects = ['a', 'b']" — the same surface the program grammar accepts.
std::string render_object_list(const std::vector<std::string>& names);

// preamble, example programs and the filled body, joined by blank lines.
// Throws UnfilledSlotError when instruction or the object list is empty.
std::string build_generation_prompt(const PromptTemplate& templates,
                                    const std::vector<std::string>& examples,
                                    const std::string& instruction,
                                    const std::vector<std::string>& objects);

// Asks for `source` rewritten against the target scene. Throws
// UnfilledSlotError when the instruction, object list or source code is empty.
std::string build_adaptation_prompt(const PromptTemplate& templates, const SuccessLog& source,
                                    const std::string& target_environment,
                                    const std::string& instruction,
                                    const std::vector<std::string>& objects);

// Correction prompt: the adapted reference program, then the failed attempt,
// then the instruction. Deliberately carries no object list — the reference
// program already names the scene. Throws UnfilledSlotError on any empty slot.
std::string build_replan_prompt(const PromptTemplate& templates,
                                const std::vector<std::string>& examples,
                                const std::string& instruction, const std::string& adapted_code,
                                const std::string& failed_code);

// Pulls the program text out of a completion: fenced code blocks first, then
// maximal runs of program-shaped lines; first candidate that parses wins.
// Throws NoProgramFoundError when nothing parses.
std::string extract_program(const std::string& completion);

}  // namespace mtp
