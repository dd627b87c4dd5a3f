#pragma once

#include <stdexcept>
#include <string>

namespace barylab {

/// Root of every error thrown by the library. Tools map these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPoint : public Error { using Error::Error; };
class DegenerateGeometry : public Error { using Error::Error; };
class InvalidMeasure : public Error { using Error::Error; };
class EmptyMeasure : public Error { using Error::Error; };
class UnbalancedMeasures : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };
class InvalidGraph : public Error { using Error::Error; };
class WindowTooLarge : public Error { using Error::Error; };
class NonTransitiveVoltage : public Error { using Error::Error; };
class RankDeficient : public Error { using Error::Error; };
class DegeneratePoint : public Error { using Error::Error; };
class OutsideDomain : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class NonGeneric : public Error { using Error::Error; };
class NonPseudomanifold : public Error { using Error::Error; };
class InvalidInput : public Error { using Error::Error; };

/// Raised when the truncation radius leaves too much exponential tail.
class TruncationTooSmall : public Error {
 public:
  TruncationTooSmall(const std::string& what, double suggested_radius)
      : Error(what), suggested_radius_(suggested_radius) {}
  [[nodiscard]] double suggested_radius() const noexcept { return suggested_radius_; }

 private:
  double suggested_radius_;
};

/// A sampled counterexample; `payload` is its JSON serialization.
class BcgViolation : public Error {
 public:
  BcgViolation(const std::string& what, std::string payload)
      : Error(what), payload_(std::move(payload)) {}
  [[nodiscard]] const std::string& payload() const noexcept { return payload_; }

 private:
  std::string payload_;
};

}  // namespace barylab
