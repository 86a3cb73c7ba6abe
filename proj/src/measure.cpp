#include "crl/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace crl {

namespace {

// Kahan-compensated sum; weight vectors must certify mass 1 within 1e-12
// even after long convolution chains.
double stable_sum(const std::vector<double>& v) {
  double sum = 0.0, carry = 0.0;
  for (double x : v) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), w_(std::move(weights)) {
  if (!space_) throw BadConfig("measure requires a space");
  if (w_.size() != space_->size())
    throw BadConfig("weight vector length does not match the space size");
  for (double x : w_) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw BadConfig("measure weights must be finite and nonnegative");
  }
  double mass = stable_sum(w_);
  if (std::abs(mass - 1.0) > tol::kMass)
    throw BadConfig("measure weights sum to " + std::to_string(mass) + ", expected 1");
}

DiscreteMeasure DiscreteMeasure::dirac(SpacePtr space, std::size_t at) {
  std::vector<double> w(space->size(), 0.0);
  w.at(at) = 1.0;
  return DiscreteMeasure(std::move(space), std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform(SpacePtr space) {
  std::size_t n = space->size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return DiscreteMeasure(std::move(space), std::move(w));
}

std::vector<std::size_t> DiscreteMeasure::support() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] > 0.0) idx.push_back(i);
  return idx;
}

double DiscreteMeasure::sup_distance(const DiscreteMeasure& other) const {
  if (!same_space(space_, other.space_)) throw SpaceMismatch();
  double m = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) m = std::max(m, std::abs(w_[i] - other.w_[i]));
  return m;
}

RandomWalkKernel::RandomWalkKernel(SpacePtr space, std::vector<double> row_major)
    : space_(std::move(space)), rows_(std::move(row_major)) {
  if (!space_) throw BadConfig("kernel requires a space");
  n_ = space_->size();
  if (rows_.size() != n_ * n_) throw BadConfig("kernel matrix must be n x n in point order");
  for (std::size_t x = 0; x < n_; ++x) {
    double sum = 0.0;
    for (std::size_t z = 0; z < n_; ++z) {
      double w = rows_[x * n_ + z];
      if (!(w >= 0.0) || !std::isfinite(w))
        throw BadConfig("kernel row " + std::to_string(x) + " has an invalid weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol::kKernelRowSum)
      throw BadConfig("kernel row " + std::to_string(x) + " sums to " + std::to_string(sum));
    // Rows arrive stochastic only to 1e-9; normalize so extracted rows meet
    // the tighter measure-mass contract. Skipping near-exact sums keeps the
    // normalization idempotent.
    if (sum != 1.0 && std::abs(sum - 1.0) > 64 * 1e-16)
      for (std::size_t z = 0; z < n_; ++z) rows_[x * n_ + z] /= sum;
  }
}

RandomWalkKernel RandomWalkKernel::identity(SpacePtr space) {
  std::size_t n = space->size();
  std::vector<double> rows(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) rows[i * n + i] = 1.0;
  return RandomWalkKernel(std::move(space), std::move(rows));
}

RandomWalkKernel RandomWalkKernel::constant(const DiscreteMeasure& target) {
  std::size_t n = target.size();
  std::vector<double> rows(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t z = 0; z < n; ++z) rows[i * n + z] = target[z];
  return RandomWalkKernel(target.space(), std::move(rows));
}

DiscreteMeasure RandomWalkKernel::row(std::size_t x) const {
  std::vector<double> w(rows_.begin() + static_cast<std::ptrdiff_t>(x * n_),
                        rows_.begin() + static_cast<std::ptrdiff_t>((x + 1) * n_));
  return DiscreteMeasure(space_, std::move(w));
}

DiscreteMeasure convolve(const DiscreteMeasure& mu, const RandomWalkKernel& kernel) {
  if (!same_space(mu.space(), kernel.space())) throw SpaceMismatch();
  std::size_t n = mu.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double w = mu[x];
    if (w == 0.0) continue;
    const double* row = kernel.matrix().data() + x * n;
    for (std::size_t z = 0; z < n; ++z) out[z] += w * row[z];
  }
  // Kernel rows are only stochastic to 1e-9, so the convolved total can sit
  // outside the 1e-12 mass contract; rescale by the computed total.
  double total = 0.0;
  for (double v : out) total += v;
  if (total != 1.0 && std::abs(total - 1.0) <= 1e-8)
    for (auto& v : out) v /= total;
  return DiscreteMeasure(mu.space(), std::move(out));
}

RandomWalkKernel iterate_kernel(const RandomWalkKernel& kernel, std::uint64_t t) {
  if (t < 1) throw BadConfig("iteration count must be at least 1");
  if (t > 1000000) throw BadConfig("iteration count capped at 1e6, got " + std::to_string(t));
  std::size_t n = kernel.size();
  // Rows drift off stochasticity multiplicatively across repeated products;
  // renormalizing every product keeps the drift from compounding.
  auto multiply = [n](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        double aik = a[i * n + k];
        if (aik == 0.0) continue;
        const double* brow = b.data() + k * n;
        double* crow = c.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
      }
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += c[i * n + j];
      if (sum != 1.0 && std::abs(sum - 1.0) <= 1e-6)
        for (std::size_t j = 0; j < n; ++j) c[i * n + j] /= sum;
    }
    return c;
  };
  std::vector<double> base = kernel.matrix();
  std::vector<double> acc;
  bool have = false;
  std::uint64_t e = t;
  while (e > 0) {
    if (e & 1) {
      acc = have ? multiply(acc, base) : base;
      have = true;
    }
    e >>= 1;
    if (e > 0) base = multiply(base, base);
  }
  return RandomWalkKernel(kernel.space(), std::move(acc));
}

}  // namespace crl
