#pragma once

#include <stdexcept>
#include <string>

namespace sift {

/// A factorization did not converge, or an inner system that must be
/// positive definite was not. Usually means a violated precondition upstream.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Operand dimensions do not agree.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input outside the mathematical domain of the operation (non-finite
/// entries, indefinite matrix where PSD is required, bad tuning values).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A subspace basis is not linearly independent.
class RankDeficiency : public std::runtime_error {
 public:
  explicit RankDeficiency(const std::string& what) : std::runtime_error(what) {}
};

/// Persistency window other than 1 requested for the closed-form EF bounds.
class UnsupportedWindow : public std::invalid_argument {
 public:
  explicit UnsupportedWindow(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace sift
