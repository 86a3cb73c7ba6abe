#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "crl/transport.hpp"

namespace crl {

// kappa_p over all point pairs. The diagonal is undefined and stored as NaN;
// it never enters the inf/sup.
struct CurvatureReport {
  double p = 1.0;
  std::size_t n = 0;
  std::vector<double> kappa_matrix;  // n x n, NaN on the diagonal
  double kappa_inf = std::numeric_limits<double>::quiet_NaN();
  double kappa_sup = std::numeric_limits<double>::quiet_NaN();
  std::pair<std::size_t, std::size_t> argmin_pair{0, 0};

  double at(std::size_t x, std::size_t y) const { return kappa_matrix[x * n + y]; }
};

// kappa_p(x,y) = 1 - W_p(m_x, m_y) / d(x,y) for distinct x, y.
double kappa(const RandomWalkKernel& kernel, std::size_t x, std::size_t y, double p);

// Exhaustive sweep over all unordered pairs; each pair is solved once, so the
// matrix is exactly symmetric. Pair solves may run in parallel.
CurvatureReport curvature_report(const RandomWalkKernel& kernel, double p, int threads = 1);

struct ContractionViolation {
  std::size_t sample = 0;
  std::vector<double> mu, nu;
  double before = 0.0, after = 0.0, bound = 0.0;
};

struct ContractionReport {
  double p = 1.0;
  double kappa_inf = 0.0;
  double rate_bound = 1.0;  // 1 - kappa_inf
  std::size_t samples = 0;
  double max_ratio = 0.0;  // max W_p(mu*m, nu*m) / W_p(mu, nu) observed
  std::vector<ContractionViolation> violations;

  // A violation means a solver or transcription bug, not a property of the
  // input; surfaces it as the typed error.
  void require_clean() const;
};

// Samples `samples` Dirichlet(1) pairs and checks
// W_p(mu*m, nu*m) <= (1 - kappa_inf) W_p(mu, nu) + 1e-8 on each.
ContractionReport contraction_check(const RandomWalkKernel& kernel, double p, double kappa_inf,
                                    std::size_t samples, std::uint64_t seed);

}  // namespace crl
