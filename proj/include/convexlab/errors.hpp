#pragma once

#include <stdexcept>
#include <string>

namespace convexlab {

// Violated call contract (dimension mismatch, bad argument ranges).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A theorem hypothesis fails quantitatively; callers map these to exit code 2.
class HypothesisError : public std::runtime_error {
 public:
  enum class Kind {
    NotCoercive,        // smallest singular value is zero / nu <= 0
    MuNonpositive,      // eps >= nu/(2L), the constants chain collapses
    NormNotPowerType,   // fitted power-type constant C <= 0
    HypothesisMissing,  // a required ingredient (e.g. inverse) is absent
    UnsupportedDimension,
  };

  HypothesisError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class NoPreimageFound : public std::runtime_error {
 public:
  NoPreimageFound(double best_residual, const std::string& what)
      : std::runtime_error(what), best_residual_(best_residual) {}

  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace convexlab
