#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crowdasm {

enum class ErrorCode {
  // configuration
  NegativePrice,
  BadAlphaSigns,
  EmptyRequirements,
  NonPositiveRho,
  BadEpsilon,
  BadSkillCount,
  BadTaskType,
  BadCost,
  BadWorker,
  UnknownKey,
  ParseError,
  // numerics
  LengthMismatch,
  DomainError,
  // reputation
  NoEligibleWorkers,
  MissingSkillReliability,
  MissingReliability,
  // scheduler / simulator
  InternalInconsistency,
  // oracle
  SearchSpaceTooLarge,
  UnknownPolicy,
  // metrics
  TraceTooShort,
  EmptyTrace,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativePrice: return "NegativePrice";
    case ErrorCode::BadAlphaSigns: return "BadAlphaSigns";
    case ErrorCode::EmptyRequirements: return "EmptyRequirements";
    case ErrorCode::NonPositiveRho: return "NonPositiveRho";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::BadSkillCount: return "BadSkillCount";
    case ErrorCode::BadTaskType: return "BadTaskType";
    case ErrorCode::BadCost: return "BadCost";
    case ErrorCode::BadWorker: return "BadWorker";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoEligibleWorkers: return "NoEligibleWorkers";
    case ErrorCode::MissingSkillReliability: return "MissingSkillReliability";
    case ErrorCode::MissingReliability: return "MissingReliability";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::UnknownPolicy: return "UnknownPolicy";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Violation {
  ErrorCode code;
  std::string message;
};

/// Thrown by config validation; carries every violated invariant, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<Violation> violations)
      : Error(violations.empty() ? ErrorCode::ParseError : violations.front().code,
              summarize(violations)),
        violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

  bool has(ErrorCode code) const noexcept {
    for (const auto& v : violations_) {
      if (v.code == code) return true;
    }
    return false;
  }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string out = std::to_string(vs.size()) + " violation(s)";
    for (const auto& v : vs) {
      out += "; ";
      out += to_string(v.code);
      out += ": ";
      out += v.message;
    }
    return out;
  }

  std::vector<Violation> violations_;
};

}  // namespace crowdasm
