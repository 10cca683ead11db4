#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace storytree {

enum class ErrorKind {
  EmptyMembers,
  TimeOutOfRange,
  UnknownActor,
  DuplicateId,
  EmptyInput,
  SyntaxError,
  SchemaError,
  ElementMismatch,
  InfeasibleContiguity,
  DependentCrossing,
  BadParams,
  BadOptions,
  InconsistentInput,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMembers: return "EmptyMembers";
    case ErrorKind::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorKind::UnknownActor: return "UnknownActor";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ElementMismatch: return "ElementMismatch";
    case ErrorKind::InfeasibleContiguity: return "InfeasibleContiguity";
    case ErrorKind::DependentCrossing: return "DependentCrossing";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::BadOptions: return "BadOptions";
    case ErrorKind::InconsistentInput: return "InconsistentInput";
  }
  return "Unknown";
}

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Issue {
  ErrorKind kind;
  std::string subject;  // offending group or actor id
  std::string reason;
};

// Carries every invariant violation found in an instance, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues)
      : Error(issues.empty() ? ErrorKind::InconsistentInput : issues.front().kind, summarize(issues)),
        issues_(std::move(issues)) {}

  const std::vector<Issue>& issues() const noexcept { return issues_; }

  bool has(ErrorKind kind) const {
    for (const auto& issue : issues_)
      if (issue.kind == kind) return true;
    return false;
  }

 private:
  static std::string summarize(const std::vector<Issue>& issues) {
    std::ostringstream out;
    out << issues.size() << " issue(s)";
    for (const auto& issue : issues)
      out << "\n  " << to_string(issue.kind) << " [" << issue.subject << "] " << issue.reason;
    return out.str();
  }

  std::vector<Issue> issues_;
};

}  // namespace storytree
