#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vpfocus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity was evaluated outside the set where it is defined (e.g. r <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied parameter violates an operation's hypotheses.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input data (weights, samples, files) failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The sampler could not place any shell inside the support.
class EmptyEnsembleError : public Error {
 public:
  using Error::Error;
};

/// The self-consistent stepper halved dt below its floor without making progress.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, std::uint64_t shell_id, double time)
      : Error(what), shell_id_(shell_id), time_(time) {}

  std::uint64_t shell_id() const { return shell_id_; }
  double time() const { return time_; }

 private:
  std::uint64_t shell_id_;
  double time_;
};

/// The reference ODE integrator failed to reach its tolerance. This is a
/// test-infrastructure failure, not a simulation result.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace vpfocus
