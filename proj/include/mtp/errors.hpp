#pragma once

#include <stdexcept>
#include <string>

namespace mtp {

// Root of all engine errors. Every typed failure below derives from this so
// callers can catch the whole family or a specific condition.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ── program text ──────────────────────────────────────────────────────────

// A program line that fits none of the allowed line forms.
struct SyntaxError : Error {
  SyntaxError(int line_, const std::string& reason_)
      : Error("line " + std::to_string(line_) + ": " + reason_), line(line_), reason(reason_) {}
  int line;
  std::string reason;
};

// A program with no composer steps at all.
struct EmptyProgramError : Error {
  EmptyProgramError() : Error("program has no composer steps") {}
};

// ── memory persistence ────────────────────────────────────────────────────

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

// A memory record that is missing a key or holds a wrong-typed value.
struct SchemaError : Error {
  SchemaError(std::size_t record_index_, const std::string& reason_)
      : Error("record " + std::to_string(record_index_) + ": " + reason_),
        record_index(record_index_),
        reason(reason_) {}
  std::size_t record_index;
  std::string reason;
};

// A memory record whose stored code no longer parses.
struct RecordParseError : Error {
  RecordParseError(std::size_t record_index_, const std::string& reason_)
      : Error("record " + std::to_string(record_index_) + ": " + reason_),
        record_index(record_index_),
        reason(reason_) {}
  std::size_t record_index;
  std::string reason;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// ── embedding / retrieval ─────────────────────────────────────────────────

struct EmptyTextError : Error {
  EmptyTextError() : Error("cannot embed empty text") {}
};

struct DimensionMismatchError : Error {
  DimensionMismatchError(std::size_t a, std::size_t b)
      : Error("vector dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct IndexOutOfRangeError : Error {
  IndexOutOfRangeError(std::size_t index_, std::size_t available_)
      : Error("rank " + std::to_string(index_) + " requested but only " +
              std::to_string(available_) + " entries ranked"),
        index(index_),
        available(available_) {}
  std::size_t index;
  std::size_t available;
};

// ── completion / embedding providers ──────────────────────────────────────

// Base for anything that goes wrong while talking to a provider. `attempts`
// counts how many requests were actually sent before giving up.
struct ProviderError : Error {
  explicit ProviderError(const std::string& what, int attempts_ = 1)
      : Error(what), attempts(attempts_) {}
  int attempts;
};

struct TransportError : ProviderError {
  using ProviderError::ProviderError;
};

struct TimeoutError : ProviderError {
  using ProviderError::ProviderError;
};

struct HttpStatusError : ProviderError {
  HttpStatusError(int status_, int attempts_)
      : ProviderError("http status " + std::to_string(status_), attempts_), status(status_) {}
  int status;
};

struct MalformedResponseError : ProviderError {
  using ProviderError::ProviderError;
};

// Scripted provider in strict mode saw a prompt no entry matches.
struct UnmatchedPromptError : ProviderError {
  explicit UnmatchedPromptError(const std::string& what) : ProviderError(what) {}
};

// ── prompt assembly / response handling ───────────────────────────────────

struct UnfilledSlotError : Error {
  explicit UnfilledSlotError(const std::string& slot_)
      : Error("prompt slot not filled: " + slot_), slot(slot_) {}
  std::string slot;
};

struct NoProgramFoundError : Error {
  NoProgramFoundError() : Error("no parseable program in completion") {}
};

// ── adaptation ────────────────────────────────────────────────────────────

// An object reference with zero token overlap against every scene object.
struct NoMappableObjectError : Error {
  explicit NoMappableObjectError(const std::string& name_)
      : Error("no scene object maps to reference: " + name_), name(name_) {}
  std::string name;
};

// ── simulator / tasks ─────────────────────────────────────────────────────

struct InvalidTaskError : Error {
  explicit InvalidTaskError(const std::string& what) : Error(what) {}
};

struct UnknownObjectError : Error {
  explicit UnknownObjectError(const std::string& name_)
      : Error("unknown object: " + name_), name(name_) {}
  std::string name;
};

// ── episodes ──────────────────────────────────────────────────────────────

// commit was asked to store an episode that did not succeed.
struct NotSuccessfulError : Error {
  NotSuccessfulError() : Error("episode did not succeed; nothing to commit") {}
};

// Replay found a step whose re-execution diverges from the recorded trace.
struct DriftError : Error {
  DriftError(std::size_t step_, const std::string& what) : Error(what), step(step_) {}
  std::size_t step;
};

}  // namespace mtp
