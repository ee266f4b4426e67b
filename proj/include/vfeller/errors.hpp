#pragma once

#include <stdexcept>
#include <string>

namespace vfeller {

// Argument outside the domain of a function (negative time, point on the boundary, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A parameter violates a construction invariant. `key()` names the offending field.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// An operation was called outside its stated preconditions.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numerical procedure failed to reach its tolerance or produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double achieved = 0.0)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace vfeller
