#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace crl {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SpaceMismatch : public Error {
 public:
  SpaceMismatch() : Error("operands live on different metric spaces") {}
  explicit SpaceMismatch(const std::string& msg) : Error(msg) {}
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class SupportTooLarge : public Error {
 public:
  SupportTooLarge(std::size_t got, std::size_t cap)
      : Error("brute-force oracle limited to supports of size " + std::to_string(cap) +
              ", got " + std::to_string(got)) {}
};

class UnsupportedExponent : public Error {
 public:
  explicit UnsupportedExponent(double p)
      : Error("Wasserstein exponent must satisfy 1 <= p < inf, got " + std::to_string(p)) {}
};

class SamePoint : public Error {
 public:
  explicit SamePoint(std::size_t x)
      : Error("coarse Ricci curvature is undefined along (x,x), x = " + std::to_string(x)) {}
};

class GridTooLarge : public Error {
 public:
  GridTooLarge(std::size_t points, std::size_t cap)
      : Error("lifted space would have " + std::to_string(points) +
              " points, hard cap is " + std::to_string(cap)) {}
};

class DisconnectedGraph : public Error {
 public:
  explicit DisconnectedGraph(std::vector<std::vector<std::string>> comps);
  const std::vector<std::vector<std::string>>& components() const { return components_; }

 private:
  std::vector<std::vector<std::string>> components_;
};

class NotInvariantInput : public Error {
 public:
  explicit NotInvariantInput(double residual)
      : Error("measure is not invariant for the base kernel (residual " +
              std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

class NoConvergence : public Error {
 public:
  NoConvergence(std::size_t max_iter, double residual)
      : Error("iteration did not reach tolerance after " + std::to_string(max_iter) +
              " steps (residual " + std::to_string(residual) + ")"),
        max_iter_(max_iter),
        residual_(residual) {}
  std::size_t max_iter() const { return max_iter_; }
  double residual() const { return residual_; }

 private:
  std::size_t max_iter_ = 0;
  double residual_ = 0.0;
};

class ContractViolation : public Error {
 public:
  ContractViolation(std::size_t sample, double lhs, double bound)
      : Error("contraction bound violated at sample " + std::to_string(sample) + ": " +
              std::to_string(lhs) + " > " + std::to_string(bound)),
        sample_(sample) {}
  std::size_t sample() const { return sample_; }

 private:
  std::size_t sample_ = 0;
};

class InternalInvariantViolation : public Error {
 public:
  using Error::Error;
};

class NoLiftPoint : public Error {
 public:
  NoLiftPoint(std::size_t member, std::size_t target_point, double best)
      : Error("family member " + std::to_string(member) + " has no point mapping within "
              "tolerance of target point " + std::to_string(target_point) +
              " (best distance " + std::to_string(best) + ")") {}
};

class ExhaustiveTooLarge : public Error {
 public:
  ExhaustiveTooLarge(std::size_t n, std::size_t cap)
      : Error("exhaustive witness search limited to " + std::to_string(cap) +
              " points, got " + std::to_string(n)) {}
};

class CurvatureNotUniform : public Error {
 public:
  CurvatureNotUniform(std::size_t member, double inf, double kappa0)
      : Error("family member " + std::to_string(member) + " has curvature infimum " +
              std::to_string(inf) + " below the required bound " + std::to_string(kappa0)) {}
};

class BadConfig : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::string& path) : Error("cannot open file: " + path) {}
};

class UnknownCommand : public Error {
 public:
  explicit UnknownCommand(const std::string& cmd) : Error("unknown command: " + cmd) {}
};

}  // namespace crl
