#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "crl/errors.hpp"
#include "crl/version.hpp"

namespace crl {

class FiniteMetricSpace;
struct SpaceValidation;
using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

struct MetricViolation {
  enum class Kind {
    NotSquare,
    NonFinite,
    NonZeroDiagonal,
    NegativeDistance,
    ZeroOffDiagonal,
    NonSymmetric,
    TriangleViolation,
  };
  Kind kind;
  // For TriangleViolation: d(i,j) > d(i,k) + d(k,j). Unused slots are npos.
  std::size_t i = npos;
  std::size_t j = npos;
  std::size_t k = npos;
  double lhs = 0.0;
  double rhs = 0.0;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::string describe() const;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<MetricViolation> violations);
  const std::vector<MetricViolation>& violations() const { return violations_; }

 private:
  std::vector<MetricViolation> violations_;
};

// Named points with an exact symmetric distance matrix. Immutable after
// construction and safe to share across threads.
class FiniteMetricSpace {
 public:
  std::size_t size() const { return n_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  double distance(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  const std::vector<double>& matrix() const { return d_; }
  double diameter() const { return diameter_; }

  bool same_as(const FiniteMetricSpace& other) const;

  // Validates the metric axioms at `tolerance` and throws ValidationError on
  // failure. Labels default to p0, p1, ...
  static SpacePtr create(std::vector<double> row_major, std::vector<std::string> labels = {},
                         double tolerance = tol::kUserMetric);

 private:
  FiniteMetricSpace(std::vector<double> d, std::vector<std::string> labels, std::size_t n);
  friend SpaceValidation validate_space_flat(const std::vector<double>&, std::size_t,
                                             std::vector<std::string>, double);

  std::size_t n_ = 0;
  std::vector<double> d_;
  std::vector<std::string> labels_;
  double diameter_ = 0.0;
};

struct SpaceValidation {
  SpacePtr space;  // null when invalid
  std::vector<MetricViolation> violations;
  std::size_t total_violations = 0;  // violations list is capped; this is the full count

  bool ok() const { return space != nullptr; }
};

// Checks all metric axioms of a raw square matrix and reports every violated
// one with its offending indices. Detail entries are capped at 100.
SpaceValidation validate_space(const std::vector<std::vector<double>>& matrix,
                               std::vector<std::string> labels = {},
                               double tolerance = tol::kUserMetric);

SpaceValidation validate_space_flat(const std::vector<double>& row_major, std::size_t n,
                                    std::vector<std::string> labels = {},
                                    double tolerance = tol::kUserMetric);

struct WeightedEdge {
  std::string a;
  std::string b;
  double weight = 1.0;
};

// All-pairs shortest-path metric of a connected weighted graph
// (Floyd-Warshall). Point order follows first appearance in the edge list
// unless an explicit label order is given.
SpacePtr graph_metric(const std::vector<WeightedEdge>& edges,
                      std::vector<std::string> labels = {});

// Same point set with every distance multiplied by factor > 0.
SpacePtr scale_space(const SpacePtr& space, double factor);

bool same_space(const SpacePtr& a, const SpacePtr& b);

}  // namespace crl
