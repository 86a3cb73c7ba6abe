#include "crl/curvature.hpp"

#include <cmath>

#include "crl/parallel.hpp"
#include "crl/rng.hpp"

namespace crl {

double kappa(const RandomWalkKernel& kernel, std::size_t x, std::size_t y, double p) {
  if (x == y) throw SamePoint(x);
  // Solve each unordered pair in canonical order so kappa(x,y) == kappa(y,x)
  // holds exactly, not just up to solver rounding.
  std::size_t lo = std::min(x, y), hi = std::max(x, y);
  double w = wasserstein(kernel.row(lo), kernel.row(hi), p);
  return 1.0 - w / kernel.space()->distance(lo, hi);
}

CurvatureReport curvature_report(const RandomWalkKernel& kernel, double p, int threads) {
  std::size_t n = kernel.size();
  if (n < 2) throw BadConfig("curvature report needs at least 2 points");
  CurvatureReport report;
  report.p = p;
  report.n = n;
  report.kappa_matrix.assign(n * n, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) pairs.emplace_back(x, y);

  parallel_for(pairs.size(), threads, [&](std::size_t idx) {
    auto [x, y] = pairs[idx];
    double k = kappa(kernel, x, y, p);
    report.kappa_matrix[x * n + y] = k;
    report.kappa_matrix[y * n + x] = k;
  });

  bool first = true;
  for (auto [x, y] : pairs) {
    double k = report.kappa_matrix[x * n + y];
    if (first || k < report.kappa_inf) {
      report.kappa_inf = k;
      report.argmin_pair = {x, y};
    }
    if (first || k > report.kappa_sup) report.kappa_sup = k;
    first = false;
  }
  return report;
}

void ContractionReport::require_clean() const {
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw ContractViolation(v.sample, v.after, v.bound);
  }
}

ContractionReport contraction_check(const RandomWalkKernel& kernel, double p, double kappa_inf,
                                    std::size_t samples, std::uint64_t seed) {
  ContractionReport report;
  report.p = p;
  report.kappa_inf = kappa_inf;
  report.rate_bound = 1.0 - kappa_inf;
  report.samples = samples;

  Rng rng(seed);
  std::size_t n = kernel.size();
  for (std::size_t s = 0; s < samples; ++s) {
    DiscreteMeasure mu(kernel.space(), rng.dirichlet(n));
    DiscreteMeasure nu(kernel.space(), rng.dirichlet(n));
    double before = wasserstein(mu, nu, p);
    if (before == 0.0) continue;
    double after = wasserstein(convolve(mu, kernel), convolve(nu, kernel), p);
    double bound = report.rate_bound * before + tol::kContraction;
    report.max_ratio = std::max(report.max_ratio, after / before);
    if (after > bound)
      report.violations.push_back({s, mu.weights(), nu.weights(), before, after, bound});
  }
  return report;
}

}  // namespace crl
