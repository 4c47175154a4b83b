#include "mtp/memory_store.hpp"

#include <fstream>

#include <json.hpp>

#include "mtp/composer_dsl.hpp"
#include "mtp/errors.hpp"

namespace mtp {
namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* to_string(LogStatus) { return "success"; }

void append_log(Memory& memory, const SuccessLog& log) {
  if (trimmed(log.instruction).empty())
    throw ValidationError("cannot store a log with an empty instruction");
  parse_program(log.code);  // must be valid program text; throws otherwise
  memory.logs.push_back(log);
}

void save_memory(const Memory& memory, const std::filesystem::path& path) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const auto& log : memory.logs) {
    nlohmann::ordered_json rec;
    rec["environment"] = log.environment;
    rec["query"] = log.instruction;
    rec["code"] = log.code;
    rec["status"] = to_string(log.status);
    array.push_back(std::move(rec));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << array.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Memory load_memory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  nlohmann::json array;
  try {
    in >> array;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!array.is_array()) throw IoError("memory file is not a JSON array: " + path.string());

  Memory memory;
  memory.source_label = path.stem().string();
  for (std::size_t i = 0; i < array.size(); ++i) {
    const auto& rec = array[i];
    if (!rec.is_object()) throw SchemaError(i, "record is not an object");
    for (const char* key : {"environment", "query", "code", "status"}) {
      if (!rec.contains(key)) throw SchemaError(i, std::string("missing key: ") + key);
      if (!rec[key].is_string()) throw SchemaError(i, std::string("non-string value for: ") + key);
    }
    if (rec["status"].get<std::string>() != "success")
      throw SchemaError(i, "status must be \"success\"");
    SuccessLog log{rec["environment"].get<std::string>(), rec["query"].get<std::string>(),
                   rec["code"].get<std::string>(), LogStatus::success};
    if (trimmed(log.instruction).empty()) throw SchemaError(i, "empty query");
    try {
      parse_program(log.code);  // stored code must still satisfy the grammar
    } catch (const Error& e) {
      throw RecordParseError(i, e.what());
    }
    memory.logs.push_back(std::move(log));
  }
  return memory;
}

Memory filter_by_environment(const Memory& memory, const std::string& environment) {
  Memory out;
  out.source_label = memory.source_label;
  for (const auto& log : memory.logs) {
    if (log.environment == environment) out.logs.push_back(log);
  }
  return out;
}

}  // namespace mtp
