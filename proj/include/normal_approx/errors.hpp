#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace normal_approx {

// Base of every error thrown by the library. The CLI maps subclasses onto
// exit statuses, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed matrix / family / config files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Family members do not commute within the configured tolerance.
class NonCommutingFamily : public InvalidInput {
 public:
  NonCommutingFamily(const std::string& what, double defect)
      : InvalidInput(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

// An iterative eigensolver hit its iteration cap.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// No vector was found that is a joint eigenvector of the whole family to the
// requested tolerance. Carries the per-member residuals of the best candidate.
class JointEigenvectorFailure : public SolverFailure {
 public:
  JointEigenvectorFailure(const std::string& what, std::vector<double> residuals);
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class SubspaceNotInvariant : public Error {
 public:
  SubspaceNotInvariant(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

}  // namespace normal_approx
