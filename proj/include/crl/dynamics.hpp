#pragma once

#include <optional>
#include <vector>

#include "crl/transport.hpp"

namespace crl {

// Distance-to-limit trace with its geometric envelope.
struct RateTrace {
  double p = 1.0;
  std::vector<std::pair<std::uint64_t, double>> steps;  // (t, value)
  double rate_bound = 1.0;   // 1 - kappa_inf
  double diameter = 0.0;     // Diam of the base space
  double initial = 0.0;      // value the envelope decays from
  bool within_envelope = true;

  double envelope(std::uint64_t t) const;
  // Ratio value(t) / sup_x W_p(m_x^t, nu); only filled by lifted_rate_check.
  std::vector<double> sup_ratio;
};

struct InvariantResult {
  DiscreteMeasure measure;
  std::size_t iterations = 0;
  double residual = 0.0;  // W_p(nu, nu * m)
};

// Fixed-point iteration mu <- mu * m until W_p(mu, mu * m) <= tolerance.
// Convergence is guaranteed only for kappa_inf > 0; otherwise best effort,
// throwing NoConvergence when the budget runs out.
InvariantResult invariant_measure(const RandomWalkKernel& kernel, double p, double tolerance,
                                  std::size_t max_iter,
                                  std::optional<DiscreteMeasure> start = std::nullopt);

// W_p(mu0 * m^t, nu) for t = 0..T against the envelope
// (1 - kappa_inf)^t W_p(mu0, nu).
RateTrace convergence_trace(const RandomWalkKernel& kernel, const DiscreteMeasure& mu0,
                            const DiscreteMeasure& nu, double p, std::uint64_t T,
                            double kappa_inf);

// D_t = (sum_x nu(x) W_p(m_x^t, nu)^p)^(1/p), which equals the lifted-space
// distance W_p(nu-tilde^t, delta_nu) since couplings with a Dirac are forced.
// Envelope: Diam(X) (1 - kappa_inf)^t.
RateTrace lifted_rate_check(const RandomWalkKernel& kernel, const DiscreteMeasure& nu, double p,
                            std::uint64_t T, double kappa_inf);

}  // namespace crl
