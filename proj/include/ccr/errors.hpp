#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ccr {

// Process exit codes used by the command line tool.
enum class ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kResource = 3,
  kSolver = 4,
  kAxiomViolation = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ExitCode::kValidation, what) {}
};

/// Malformed or inconsistent input document.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ExitCode::kValidation, what) {}
};

/// An enumeration would exceed its configured cap.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t requested)
      : Error(ExitCode::kResource, what), requested_(requested) {}
  std::size_t requested() const noexcept { return requested_; }

 private:
  std::size_t requested_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations)
      : Error(ExitCode::kSolver, what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// A constrained prior set with no feasible coupling. `irreducible()` lists
/// the indices of user constraints forming an infeasible subsystem together
/// with the marginal constraints.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::size_t> irreducible)
      : Error(ExitCode::kSolver, what), irreducible_(std::move(irreducible)) {}
  const std::vector<std::size_t>& irreducible() const noexcept { return irreducible_; }

 private:
  std::vector<std::size_t> irreducible_;
};

}  // namespace ccr
