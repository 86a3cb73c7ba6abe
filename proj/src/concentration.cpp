#include "crl/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crl/logging.hpp"
#include "crl/rng.hpp"

namespace crl {

namespace {

constexpr double kMassSlack = 1e-12;

double window_min(const LineMeasure& m, double needed) {
  if (needed <= kMassSlack) return 0.0;
  std::size_t n = m.support.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t lo = 0;
  double mass = 0.0;
  for (std::size_t hi = 0; hi < n; ++hi) {
    mass += m.weights[hi];
    while (mass - m.weights[lo] >= needed - kMassSlack && lo < hi) mass -= m.weights[lo++];
    if (mass >= needed - kMassSlack)
      best = std::min(best, m.support[hi] - m.support[lo]);
  }
  return std::isfinite(best) ? best : m.support.back() - m.support.front();
}

std::vector<double> evaluate_all(const std::vector<std::vector<double>>& pool,
                                 const DiscreteMeasure& mu, double kappa) {
  std::vector<double> values(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    values[i] = partial_diameter(pushforward_line(pool[i], mu), kappa);
  return values;
}

std::vector<std::vector<double>> distance_pool(const SpacePtr& space) {
  std::size_t n = space->size();
  std::vector<std::vector<double>> pool;
  pool.reserve(n);
  for (std::size_t x0 = 0; x0 < n; ++x0) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = space->distance(x0, i);
    pool.push_back(std::move(f));
  }
  return pool;
}

std::vector<std::vector<double>> mcshane_pool(const SpacePtr& space, std::size_t trials,
                                              std::uint64_t seed) {
  std::size_t n = space->size();
  double diam = space->diameter();
  Rng rng(seed);
  std::vector<std::vector<double>> pool;
  pool.reserve(2 * trials);
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t k = 1 + rng.index(n);
    std::vector<std::size_t> anchors(n);
    std::iota(anchors.begin(), anchors.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(anchors[i], anchors[i + rng.index(n - i)]);
    anchors.resize(k);
    std::vector<double> values(k);
    for (auto& v : values) v = rng.uniform(0.0, diam);
    pool.push_back(mcshane_extension(space, anchors, values, false));
    pool.push_back(mcshane_extension(space, anchors, values, true));
  }
  return pool;
}

// Coordinate ascent inside the Lipschitz polytope; each move keeps the
// witness feasible because candidates stay within the bounds induced by the
// other coordinates.
std::vector<double> polish_witness(const SpacePtr& space, const DiscreteMeasure& mu,
                                   double kappa, std::vector<double> f, std::size_t passes) {
  std::size_t n = space->size();
  double best = partial_diameter(pushforward_line(f, mu), kappa);
  for (std::size_t pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        lo = std::max(lo, f[j] - space->distance(i, j));
        hi = std::min(hi, f[j] + space->distance(i, j));
      }
      double original = f[i];
      for (double candidate : {lo, hi, 0.5 * (lo + hi)}) {
        f[i] = candidate;
        double value = partial_diameter(pushforward_line(f, mu), kappa);
        if (value > best + 1e-15) {
          best = value;
          original = candidate;
          improved = true;
        }
      }
      f[i] = original;
    }
    if (!improved) break;
  }
  return f;
}

std::vector<std::vector<double>> exhaustive_pool(const SpacePtr& space, std::size_t budget) {
  std::size_t n = space->size();
  if (n > 5) throw ExhaustiveTooLarge(n, 5);
  double diam = space->diameter();
  if (n == 1 || diam == 0.0) return {std::vector<double>(n, 0.0)};

  // Values live on a symmetric grid with f(p0) = 0; pick the finest
  // resolution whose full enumeration fits the budget.
  std::size_t levels = 3;
  auto combos = [&](std::size_t L) {
    double total = 1.0;
    for (std::size_t i = 1; i < n; ++i) total *= static_cast<double>(2 * L + 1);
    return total;
  };
  while (combos(levels + 1) <= static_cast<double>(std::max<std::size_t>(budget, 81)))
    ++levels;
  double delta = diam / static_cast<double>(levels);

  std::vector<std::vector<double>> pool;
  std::vector<double> f(n, 0.0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
          if (std::abs(f[x] - f[y]) > space->distance(x, y) + 1e-12) return;
      pool.push_back(f);
      return;
    }
    for (long long k = -static_cast<long long>(levels); k <= static_cast<long long>(levels);
         ++k) {
      f[i] = static_cast<double>(k) * delta;
      rec(i + 1);
    }
  };
  rec(1);
  return pool;
}

}  // namespace

LineMeasure pushforward_line(const std::vector<double>& observable, const DiscreteMeasure& mu) {
  if (observable.size() != mu.size())
    throw BadConfig("observable length does not match the space size");
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0) atoms.emplace_back(observable[i], mu[i]);
  std::sort(atoms.begin(), atoms.end());
  LineMeasure lm;
  for (const auto& [pos, w] : atoms) {
    if (!lm.support.empty() && lm.support.back() == pos)
      lm.weights.back() += w;
    else {
      lm.support.push_back(pos);
      lm.weights.push_back(w);
    }
  }
  return lm;
}

double partial_diameter(const LineMeasure& m, double kappa) {
  if (m.support.empty()) throw BadConfig("empty line measure");
  if (kappa >= 1.0) return 0.0;
  return window_min(m, 1.0 - kappa);
}

std::vector<double> mcshane_extension(const SpacePtr& space,
                                      const std::vector<std::size_t>& anchors,
                                      const std::vector<double>& values, bool majorant) {
  if (anchors.empty() || anchors.size() != values.size())
    throw BadConfig("extension needs matching anchor indices and values");
  std::size_t n = space->size();
  std::vector<double> f(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (majorant) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < anchors.size(); ++s)
        best = std::max(best, values[s] - space->distance(x, anchors[s]));
      f[x] = best;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < anchors.size(); ++s)
        best = std::min(best, values[s] + space->distance(x, anchors[s]));
      f[x] = best;
    }
  }
  return f;
}

double lipschitz_constant(const SpacePtr& space, const std::vector<double>& f) {
  double lip = 0.0;
  for (std::size_t x = 0; x < space->size(); ++x)
    for (std::size_t y = x + 1; y < space->size(); ++y)
      lip = std::max(lip, std::abs(f[x] - f[y]) / space->distance(x, y));
  return lip;
}

const char* to_string(ObsStrategy s) {
  switch (s) {
    case ObsStrategy::distance_family: return "distance_family";
    case ObsStrategy::mcshane_random: return "mcshane_random";
    case ObsStrategy::local_search: return "local_search";
    case ObsStrategy::exhaustive_tiny: return "exhaustive_tiny";
  }
  return "?";
}

ObsStrategy obs_strategy_from_string(const std::string& name) {
  if (name == "distance_family") return ObsStrategy::distance_family;
  if (name == "mcshane_random") return ObsStrategy::mcshane_random;
  if (name == "local_search") return ObsStrategy::local_search;
  if (name == "exhaustive_tiny") return ObsStrategy::exhaustive_tiny;
  throw BadConfig("unknown witness strategy: " + name);
}

ObsDiamEstimate obs_diam(const SpacePtr& space, const DiscreteMeasure& mu, double kappa,
                         ObsStrategy strategy, std::size_t budget, std::uint64_t seed) {
  if (!same_space(space, mu.space())) throw SpaceMismatch();
  if (!(kappa >= 0.0)) throw BadConfig("kappa must be nonnegative");

  std::vector<std::vector<double>> pool;
  bool grid_optimal = false;
  switch (strategy) {
    case ObsStrategy::distance_family:
      pool = distance_pool(space);
      break;
    case ObsStrategy::mcshane_random:
      pool = mcshane_pool(space, std::max<std::size_t>(budget, 1), seed);
      break;
    case ObsStrategy::local_search: {
      pool = distance_pool(space);
      auto values = evaluate_all(pool, mu, kappa);
      std::size_t seed_idx = static_cast<std::size_t>(
          std::max_element(values.begin(), values.end()) - values.begin());
      pool.push_back(polish_witness(space, mu, kappa, pool[seed_idx],
                                    std::max<std::size_t>(budget, 1)));
      break;
    }
    case ObsStrategy::exhaustive_tiny:
      pool = exhaustive_pool(space, std::max<std::size_t>(budget, 81));
      grid_optimal = true;
      break;
  }

  ObsDiamEstimate best;
  best.kappa = kappa;
  best.strategy = strategy;
  best.grid_optimal = grid_optimal;
  best.value = -1.0;
  auto values = evaluate_all(pool, mu, kappa);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (values[i] > best.value) {
      best.value = values[i];
      best.witness = pool[i];
    }
  }

  // Self-certification: the witness must be 1-Lipschitz and reproduce the
  // value; anything else is a bug in the pool construction.
  if (lipschitz_constant(space, best.witness) > 1.0 + tol::kLipschitzWitness)
    throw InternalInvariantViolation("witness is not 1-Lipschitz");
  double recheck = partial_diameter(pushforward_line(best.witness, mu), kappa);
  if (recheck != best.value)
    throw InternalInvariantViolation("witness value failed to reproduce");
  return best;
}

ObsDiamScalar obs_diam_scalar(const SpacePtr& space, const DiscreteMeasure& mu,
                              std::size_t budget, std::uint64_t seed) {
  // One kappa-independent pool shared by the whole scan keeps the first arm
  // monotone in kappa.
  auto pool = distance_pool(space);
  auto extra = mcshane_pool(space, std::max<std::size_t>(budget / 8, 8), seed);
  pool.insert(pool.end(), extra.begin(), extra.end());

  std::size_t grid_points = std::max<std::size_t>(64, budget);
  double lo = 1.0 / (2.0 * static_cast<double>(grid_points));
  double hi = 1.0 - lo;
  ObsDiamScalar result;
  result.grid_points = grid_points;
  result.value = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid_points; ++g) {
    double t = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    double kappa = lo * std::pow(hi / lo, t);  // geometric-uniform in (0,1)
    double arm = 0.0;
    for (const auto& f : pool)
      arm = std::max(arm, partial_diameter(pushforward_line(f, mu), kappa));
    double value = std::max(arm, kappa);
    if (value < result.value) {
      result.value = value;
      result.kappa_at_min = kappa;
    }
  }
  return result;
}

LevyReport levy_experiment(const std::vector<LevyFamilyMember>& family, double kappa0,
                           int grid_denominator, double kappa, ObsStrategy strategy,
                           std::size_t budget, std::uint64_t seed, int threads) {
  if (family.empty()) throw BadConfig("empty family");
  if (!(kappa0 < 1.0)) throw BadConfig("kappa0 must leave C = 1 - kappa0 positive");
  LevyReport report;
  report.kappa0 = kappa0;
  report.contraction = 1.0 - kappa0;
  report.kappa = kappa;
  const double C = report.contraction;

  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    const auto& member = family[idx];
    LevyMemberReport mr;
    mr.name = member.name;
    Rng member_rng = Rng(seed).derive(idx);

    auto cr = curvature_report(member.kernel, 1.0, threads);
    mr.kappa_inf = cr.kappa_inf;
    if (cr.kappa_inf < kappa0 - 1e-12) throw CurvatureNotUniform(idx, cr.kappa_inf, kappa0);

    mr.base = obs_diam(member.space, member.mu, kappa, strategy, budget, member_rng.next_u64());

    // Claim-1 transfer at witness level: rescaling the witness onto CX must
    // scale the value by exactly C.
    SpacePtr scaled = scale_space(member.space, C);
    DiscreteMeasure scaled_mu(scaled, member.mu.weights());
    std::vector<double> rescaled = mr.base.witness;
    for (auto& v : rescaled) v *= C;
    mr.scaled_from_witness = partial_diameter(pushforward_line(rescaled, scaled_mu), kappa);
    if (std::abs(mr.scaled_from_witness - C * mr.base.value) > 1e-12)
      throw InternalInvariantViolation(
          "witness rescaling broke scaling equivariance on member " + member.name);
    mr.scaled_native =
        obs_diam(scaled, scaled_mu, kappa, strategy, budget, member_rng.next_u64());

    // Lifted space with the pushforward measure m_* mu.
    auto lifted = build_lifted_space(member.space, member.kernel, 1.0, grid_denominator, {},
                                     threads);
    DiscreteMeasure lifted_mu = lift_measure(*lifted, member.mu);
    mr.lifted = obs_diam(lifted->metric, lifted_mu, kappa, strategy, budget,
                         member_rng.next_u64());

    // Claim-2 transfer: the lifted witness composed with the walk map is a
    // C-Lipschitz observable on the base.
    std::vector<double> pullback(member.space->size());
    for (std::size_t x = 0; x < pullback.size(); ++x)
      pullback[x] = mr.lifted.witness[lifted->walkpoint_index[x]];
    mr.pullback_lipschitz = lipschitz_constant(member.space, pullback);
    if (mr.pullback_lipschitz > C + tol::kContraction)
      throw InternalInvariantViolation("lifted witness pullback exceeded the C-Lipschitz bound "
                                       "on member " + member.name);

    mr.scalar_base = obs_diam_scalar(member.space, member.mu, budget,
                                     member_rng.next_u64()).value;
    mr.scalar_lifted = obs_diam_scalar(lifted->metric, lifted_mu, budget,
                                       member_rng.next_u64()).value;
    // Ordering of raw lower bounds across spaces is flagged, never asserted.
    mr.lifted_le_scaled_raw = mr.lifted.value <= C * mr.base.value + 1e-9;

    report.members.push_back(std::move(mr));
  }
  return report;
}

}  // namespace crl
