#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mtp {

enum class LogStatus { success };  // only successful episodes are ever stored

const char* to_string(LogStatus s);

// One committed success: the environment it ran in, the instruction it
// solved, and the exact program text that solved it.
struct SuccessLog {
  std::string environment;
  std::string instruction;
  std::string code;
  LogStatus status = LogStatus::success;
  bool operator==(const SuccessLog&) const = default;
};

// Append-only, insertion-ordered procedural memory. Duplicates are kept:
// repeated successes are evidence, not noise.
struct Memory {
  std::vector<SuccessLog> logs;
  std::string source_label;  // origin label for ablation tables, not persisted

  std::size_t size() const { return logs.size(); }
  bool empty() const { return logs.empty(); }
};

// Validates instruction (non-empty after trimming) and code (must parse);
// throws ValidationError / SyntaxError / EmptyProgramError.
void append_log(Memory& memory, const SuccessLog& log);

// On-disk format: a UTF-8 JSON array of records with keys exactly
// "environment", "query", "code", "status". Round-trips: load(save(M)) == M.
void save_memory(const Memory& memory, const std::filesystem::path& path);

// Throws IoError (unreadable/not an array), SchemaError (index of the first
// bad record) or RecordParseError (record whose code no longer parses).
Memory load_memory(const std::filesystem::path& path);

Memory filter_by_environment(const Memory& memory, const std::string& environment);

}  // namespace mtp
