#include "crl/dynamics.hpp"

#include <cmath>

#include "crl/logging.hpp"

namespace crl {

double RateTrace::envelope(std::uint64_t t) const {
  return initial * std::pow(rate_bound, static_cast<double>(t));
}

InvariantResult invariant_measure(const RandomWalkKernel& kernel, double p, double tolerance,
                                  std::size_t max_iter, std::optional<DiscreteMeasure> start) {
  if (!(tolerance > 0.0)) throw BadConfig("tolerance must be positive");
  DiscreteMeasure mu = start ? std::move(*start) : DiscreteMeasure::uniform(kernel.space());
  if (!same_space(mu.space(), kernel.space())) throw SpaceMismatch();

  double residual = 0.0;
  for (std::size_t it = 0; it <= max_iter; ++it) {
    DiscreteMeasure next = convolve(mu, kernel);
    residual = wasserstein(mu, next, p);
    if (residual <= tolerance) return {std::move(mu), it, residual};
    mu = std::move(next);
  }
  throw NoConvergence(max_iter, residual);
}

RateTrace convergence_trace(const RandomWalkKernel& kernel, const DiscreteMeasure& mu0,
                            const DiscreteMeasure& nu, double p, std::uint64_t T,
                            double kappa_inf) {
  RateTrace trace;
  trace.p = p;
  trace.rate_bound = 1.0 - kappa_inf;
  trace.diameter = kernel.space()->diameter();
  trace.initial = wasserstein(mu0, nu, p);

  DiscreteMeasure mu = mu0;
  for (std::uint64_t t = 0; t <= T; ++t) {
    double value = t == 0 ? trace.initial : wasserstein(mu, nu, p);
    trace.steps.emplace_back(t, value);
    if (value > trace.envelope(t) + tol::kContraction) trace.within_envelope = false;
    if (t < T) mu = convolve(mu, kernel);
  }
  return trace;
}

RateTrace lifted_rate_check(const RandomWalkKernel& kernel, const DiscreteMeasure& nu, double p,
                            std::uint64_t T, double kappa_inf) {
  if (!(kappa_inf > 0.0))
    log::warn("lifted rate check without a positive curvature bound; envelope is vacuous");
  RateTrace trace;
  trace.p = p;
  trace.rate_bound = 1.0 - kappa_inf;
  trace.diameter = kernel.space()->diameter();
  trace.initial = trace.diameter;

  std::size_t n = kernel.size();
  RandomWalkKernel stepped = RandomWalkKernel::identity(kernel.space());
  for (std::uint64_t t = 0; t <= T; ++t) {
    double acc = 0.0;
    double sup = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (nu[x] == 0.0) continue;
      double w = wasserstein(stepped.row(x), nu, p);
      acc += nu[x] * std::pow(w, p);
      sup = std::max(sup, w);
    }
    double value = std::pow(acc, 1.0 / p);
    trace.steps.emplace_back(t, value);
    trace.sup_ratio.push_back(sup > 0.0 ? value / sup : 1.0);
    if (value > trace.envelope(t) + tol::kContraction) trace.within_envelope = false;
    if (t < T) {
      // Sequential accumulation keeps m^{t+1} = m^t * m exact step by step.
      std::vector<double> next(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
          double v = stepped.at(i, k);
          if (v == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) next[i * n + j] += v * kernel.at(k, j);
        }
      stepped = RandomWalkKernel(kernel.space(), std::move(next));
    }
  }
  return trace;
}

}  // namespace crl
