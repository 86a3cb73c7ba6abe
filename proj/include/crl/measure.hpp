#pragma once

#include <cstdint>
#include <vector>

#include "crl/metric_space.hpp"

namespace crl {

// Probability weights over a space's points. Immutable; Diracs are the
// degenerate case.
class DiscreteMeasure {
 public:
  DiscreteMeasure(SpacePtr space, std::vector<double> weights);

  static DiscreteMeasure dirac(SpacePtr space, std::size_t at);
  static DiscreteMeasure uniform(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const std::vector<double>& weights() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  std::size_t size() const { return w_.size(); }

  // Indices with strictly positive weight.
  std::vector<std::size_t> support() const;

  // Largest absolute weight difference; SpaceMismatch if spaces differ.
  double sup_distance(const DiscreteMeasure& other) const;

 private:
  SpacePtr space_;
  std::vector<double> w_;
};

// One probability measure m_x per point x: a row-stochastic matrix.
class RandomWalkKernel {
 public:
  RandomWalkKernel(SpacePtr space, std::vector<double> row_major);

  static RandomWalkKernel identity(SpacePtr space);
  static RandomWalkKernel constant(const DiscreteMeasure& target);

  const SpacePtr& space() const { return space_; }
  const std::vector<double>& matrix() const { return rows_; }
  std::size_t size() const { return n_; }
  double at(std::size_t x, std::size_t z) const { return rows_[x * n_ + z]; }
  DiscreteMeasure row(std::size_t x) const;

 private:
  SpacePtr space_;
  std::vector<double> rows_;
  std::size_t n_ = 0;
};

// (mu * m)(z) = sum_x mu(x) m_x(z); linear in mu, preserves total mass.
DiscreteMeasure convolve(const DiscreteMeasure& mu, const RandomWalkKernel& kernel);

// t-step kernel: row x equals the law of the walk started at x after t steps.
// Computed by repeated matrix multiplication (binary powering); t in [1, 1e6].
RandomWalkKernel iterate_kernel(const RandomWalkKernel& kernel, std::uint64_t t);

}  // namespace crl
