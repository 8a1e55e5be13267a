#pragma once

#include <stdexcept>
#include <string>

namespace finjj {

/// Invalid physical parameters or arguments outside an operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense representation was requested past the configured size limit.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An iterative procedure stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  // Bracket width, residual or relative change reached when iteration stopped.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace finjj
