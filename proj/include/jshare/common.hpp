#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace jshare {

/// Minutes since service-day midnight, or a duration in minutes.
using Minutes = int;

/// Length of the single service day every journey must fit into.
inline constexpr Minutes kDayMinutes = 1440;

/// Opaque stop identifier (ATCO-style code).
struct StopId {
  std::string value;

  StopId() = default;
  explicit StopId(std::string v) : value(std::move(v)) {}
  explicit StopId(const char* v) : value(v) {}

  auto operator<=>(const StopId&) const = default;
  bool operator==(const StopId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const StopId& id) {
  return os << id.value;
}

struct AgentId {
  int value = 0;

  constexpr AgentId() = default;
  constexpr explicit AgentId(int v) : value(v) {}

  auto operator<=>(const AgentId&) const = default;
  bool operator==(const AgentId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, AgentId id) {
  return os << id.value;
}

/// Ordered stop pair identifying a relaxed-domain edge.
using EdgeKey = std::pair<StopId, StopId>;

// Error hierarchy. Everything thrown by the library derives from Error so
// callers can separate input problems from internal invariant violations.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: unknown ids, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed tabular or config text.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A record references an entity that does not exist.
class ReferenceError : public InputError {
 public:
  using InputError::InputError;
};

/// Scenario cannot be generated (e.g. no admissible origin/destination pair).
class ScenarioError : public InputError {
 public:
  using InputError::InputError;
};

/// Internal invariant violated. Indicates a bug, not bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace jshare

template <>
struct std::hash<jshare::StopId> {
  std::size_t operator()(const jshare::StopId& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};
