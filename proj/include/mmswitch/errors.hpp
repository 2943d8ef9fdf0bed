#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmswitch {

enum class Errc {
  NonGenerator,
  BadStochasticRow,
  NonPositiveIntensity,
  TriangleViolation,
  NonPositiveSwitchCost,
  BadCostMatrix,
  BadBelief,
  NegativeTime,
  DegenerateMass,
  ImpossibleMark,
  UnsortedArrivals,
  ResolutionTooLarge,
  MissingLayer,
  NoDiscount,
  MaxIterations,
  HorizonExceeded,
  InadmissibleStrategy,
  ConfigError,
  ArtifactMismatch,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonGenerator: return "NonGenerator";
    case Errc::BadStochasticRow: return "BadStochasticRow";
    case Errc::NonPositiveIntensity: return "NonPositiveIntensity";
    case Errc::TriangleViolation: return "TriangleViolation";
    case Errc::NonPositiveSwitchCost: return "NonPositiveSwitchCost";
    case Errc::BadCostMatrix: return "BadCostMatrix";
    case Errc::BadBelief: return "BadBelief";
    case Errc::NegativeTime: return "NegativeTime";
    case Errc::DegenerateMass: return "DegenerateMass";
    case Errc::ImpossibleMark: return "ImpossibleMark";
    case Errc::UnsortedArrivals: return "UnsortedArrivals";
    case Errc::ResolutionTooLarge: return "ResolutionTooLarge";
    case Errc::MissingLayer: return "MissingLayer";
    case Errc::NoDiscount: return "NoDiscount";
    case Errc::MaxIterations: return "MaxIterations";
    case Errc::HorizonExceeded: return "HorizonExceeded";
    case Errc::InadmissibleStrategy: return "InadmissibleStrategy";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ArtifactMismatch: return "ArtifactMismatch";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

struct ValidationIssue {
  Errc code;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues)
      : Error(issues.empty() ? Errc::ConfigError : issues.front().code, join(issues)),
        issues_(std::move(issues)) {}
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<ValidationIssue>& issues) {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += "; ";
      s += i.message;
    }
    return s;
  }
  std::vector<ValidationIssue> issues_;
};

}  // namespace mmswitch
