#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eigcoint {

enum class Errc {
  InvalidMatrix,
  ConvergenceFailure,
  SingularMatrix,
  LagTooLarge,
  InvalidSeries,
  DegenerateSpectrum,
  InvalidRank,
  NotOrthonormal,
  DimensionMismatch,
  SingularBasis,
  InvalidOrder,
  NonstationaryAR,
  SingularMixing,
  SingularMoments,
  DegenerateComponent,
  InvalidArgument,
  InvalidPlan,
  ParseError,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidMatrix: return "InvalidMatrix";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::LagTooLarge: return "LagTooLarge";
    case Errc::InvalidSeries: return "InvalidSeries";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::InvalidRank: return "InvalidRank";
    case Errc::NotOrthonormal: return "NotOrthonormal";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularBasis: return "SingularBasis";
    case Errc::InvalidOrder: return "InvalidOrder";
    case Errc::NonstationaryAR: return "NonstationaryAR";
    case Errc::SingularMixing: return "SingularMixing";
    case Errc::SingularMoments: return "SingularMoments";
    case Errc::DegenerateComponent: return "DegenerateComponent";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidPlan: return "InvalidPlan";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the kind;
/// `condition()` is set for SingularMatrix-style failures.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what,
        std::optional<double> condition = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        condition_(condition) {}

  Errc code() const noexcept { return code_; }
  std::optional<double> condition() const noexcept { return condition_; }

 private:
  Errc code_;
  std::optional<double> condition_;
};

}  // namespace eigcoint
