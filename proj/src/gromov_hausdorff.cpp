#include "crl/gromov_hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crl/logging.hpp"
#include "crl/parallel.hpp"

namespace crl {

double check_approximation(const std::vector<std::size_t>& assignment, const SpacePtr& source,
                           const SpacePtr& target) {
  std::size_t m = source->size();
  if (assignment.size() != m) throw BadConfig("assignment must cover every source point");
  for (std::size_t x = 0; x < m; ++x)
    if (assignment[x] >= target->size()) throw BadConfig("assignment maps outside the target");

  double distortion = 0.0;
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = x + 1; y < m; ++y) {
      double gap = std::abs(target->distance(assignment[x], assignment[y]) -
                            source->distance(x, y));
      distortion = std::max(distortion, gap);
    }
  double covering = 0.0;
  for (std::size_t t = 0; t < target->size(); ++t) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < m; ++x)
      nearest = std::min(nearest, target->distance(assignment[x], t));
    covering = std::max(covering, nearest);
  }
  return std::max(distortion, covering);
}

ApproximationMap make_approximation_map(SpacePtr source, SpacePtr target,
                                        std::vector<std::size_t> assignment) {
  double eps = check_approximation(assignment, source, target);
  return {std::move(source), std::move(target), std::move(assignment), eps};
}

ApproximationMap quasi_inverse(const ApproximationMap& f) {
  const auto& X = *f.source;
  const auto& Y = *f.target;
  std::vector<std::size_t> back(Y.size());
  for (std::size_t y = 0; y < Y.size(); ++y) {
    std::size_t pick = X.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < X.size(); ++x) {
      double d = Y.distance(f.assignment[x], y);
      if (d < best) {  // smallest index wins ties
        best = d;
        pick = x;
      }
    }
    if (best > f.epsilon + 1e-12)
      throw InternalInvariantViolation(
          "covering condition failed: target point " + std::to_string(y) +
          " is " + std::to_string(best) + " away from the image, claimed epsilon " +
          std::to_string(f.epsilon));
    back[y] = pick;
  }

  ApproximationMap inv = make_approximation_map(f.target, f.source, std::move(back));
  if (inv.epsilon > 3.0 * f.epsilon + 1e-9)
    throw InternalInvariantViolation("quasi-inverse epsilon " + std::to_string(inv.epsilon) +
                                     " exceeds 3x" + std::to_string(f.epsilon));
  for (std::size_t y = 0; y < Y.size(); ++y) {
    double round = Y.distance(y, f.assignment[inv.assignment[y]]);
    if (round > f.epsilon + 1e-9)
      throw InternalInvariantViolation("round trip on the target exceeded epsilon at " +
                                       std::to_string(y));
  }
  for (std::size_t x = 0; x < X.size(); ++x) {
    double round = X.distance(x, inv.assignment[f.assignment[x]]);
    if (round > 2.0 * f.epsilon + 1e-9)
      throw InternalInvariantViolation("round trip on the source exceeded 2 epsilon at " +
                                       std::to_string(x));
  }
  return inv;
}

DiscreteMeasure pushforward(const ApproximationMap& f, const DiscreteMeasure& mu) {
  if (!same_space(mu.space(), f.source)) throw SpaceMismatch();
  std::vector<double> w(f.target->size(), 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x) w[f.assignment[x]] += mu[x];
  return DiscreteMeasure(f.target, std::move(w));
}

namespace {

// x_n: the source point whose image lies nearest the target point x.
std::size_t lift_point(const ApproximationMap& f, std::size_t x, double tolerance,
                       std::size_t member) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t pick = 0;
  for (std::size_t q = 0; q < f.source->size(); ++q) {
    double d = f.target->distance(f.assignment[q], x);
    if (d < best) {
      best = d;
      pick = q;
    }
  }
  if (best > f.epsilon + tolerance) throw NoLiftPoint(member, x, best);
  return pick;
}

}  // namespace

MapConvergenceReport map_convergence_check(const std::vector<WalkFamilyMember>& family,
                                           const std::optional<RandomWalkKernel>& candidate,
                                           double p, double tolerance, int threads) {
  if (family.empty()) throw BadConfig("empty family");
  SpacePtr target = family.front().to_target.target;
  for (const auto& member : family)
    if (!same_space(member.to_target.target, target))
      throw BadConfig("family members must map to one common target");
  if (candidate && !same_space(candidate->space(), target))
    throw BadConfig("candidate kernel must live on the target space");

  MapConvergenceReport report;
  report.p = p;
  std::size_t K = family.size();
  std::size_t T = target->size();

  for (const auto& member : family) report.epsilons.push_back(member.to_target.epsilon);

  report.pushforwards.resize(K);
  for (std::size_t a = 0; a < K; ++a) {
    const auto& member = family[a];
    report.pushforwards[a].reserve(T);
    for (std::size_t x = 0; x < T; ++x) {
      std::size_t xn = lift_point(member.to_target, x, tolerance, a);
      report.pushforwards[a].push_back(pushforward(member.to_target, member.kernel.row(xn)));
    }
  }

  if (candidate) {
    report.to_candidate.assign(K, 0.0);
    parallel_for(K, threads, [&](std::size_t a) {
      double worst = 0.0;
      for (std::size_t x = 0; x < T; ++x)
        worst = std::max(worst,
                         wasserstein(report.pushforwards[a][x], candidate->row(x), p));
      report.to_candidate[a] = worst;
    });
    report.candidate_ok = report.to_candidate.back() <= tolerance;
    return report;
  }

  report.moduli.assign(K, std::vector<double>(K, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a + 1; b < K; ++b) pairs.emplace_back(a, b);
  parallel_for(pairs.size(), threads, [&](std::size_t idx) {
    auto [a, b] = pairs[idx];
    double worst = 0.0;
    for (std::size_t x = 0; x < T; ++x)
      worst = std::max(worst,
                       wasserstein(report.pushforwards[a][x], report.pushforwards[b][x], p));
    report.moduli[a][b] = worst;
    report.moduli[b][a] = worst;
  });

  report.final_modulus = K >= 2 ? report.moduli[K - 2][K - 1] : 0.0;
  report.cauchy_pass = report.final_modulus <= tolerance;
  // Longest suffix whose consecutive moduli decrease: the best candidate
  // subsequence when the full sequence oscillates.
  std::size_t start = K >= 1 ? K - 1 : 0;
  while (start > 0 && (start == K - 1 ||
                       report.moduli[start - 1][start] >= report.moduli[start][start + 1]))
    --start;
  for (std::size_t i = start; i < K; ++i) report.best_subsequence.push_back(i);
  return report;
}

StabilityReport stability_experiment(const std::vector<WalkFamilyMember>& family, double p,
                                     double kappa0, double cauchy_tolerance, int threads) {
  if (family.empty()) throw BadConfig("empty family");
  SpacePtr target = family.front().to_target.target;
  double target_diam = target->diameter();
  for (const auto& member : family) {
    if (member.space->diameter() > 4.0 * target_diam + 1.0)
      throw BadConfig("family member diameter " + std::to_string(member.space->diameter()) +
                      " is unbounded relative to the target; refusing the family");
  }

  StabilityReport report;
  report.p = p;
  report.kappa0 = kappa0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    auto cr = curvature_report(family[i].kernel, p, threads);
    report.member_infs.push_back(cr.kappa_inf);
    if (cr.kappa_inf < kappa0 - 1e-12)
      throw BadConfig("family member " + std::to_string(i) + " has curvature infimum " +
                      std::to_string(cr.kappa_inf) + " below kappa0");
  }

  report.convergence = map_convergence_check(family, std::nullopt, p, cauchy_tolerance, threads);
  report.tolerance = 2.0 * (family.back().to_target.epsilon + tol::kOracle);

  if (!report.convergence.cauchy_pass) {
    report.holds = false;
    log::info("stability experiment: pushforwards are not Cauchy (final modulus " +
              std::to_string(report.convergence.final_modulus) + "); no limit kernel built");
    return report;
  }

  // Last pushforward as the certified representative of the limit.
  const auto& rows = report.convergence.pushforwards.back();
  std::size_t T = target->size();
  std::vector<double> limit(T * T, 0.0);
  for (std::size_t x = 0; x < T; ++x)
    for (std::size_t z = 0; z < T; ++z) limit[x * T + z] = rows[x][z];
  report.limit_kernel = RandomWalkKernel(target, std::move(limit));

  auto limit_report = curvature_report(*report.limit_kernel, p, threads);
  report.limit_inf = limit_report.kappa_inf;
  report.holds = report.limit_inf >= kappa0 - report.tolerance;
  return report;
}

std::vector<WalkFamilyMember> make_cycle_family(const std::vector<int>& sizes, double laziness) {
  if (sizes.empty()) throw BadConfig("cycle family needs at least one size");
  if (!(laziness >= 0.0 && laziness < 1.0)) throw BadConfig("laziness must be in [0,1)");
  for (int s : sizes)
    if (s < 3) throw BadConfig("cycle sizes must be >= 3");
  int M = *std::max_element(sizes.begin(), sizes.end());

  auto make_cycle = [&](int m) -> SpacePtr {
    // Edge weight M/m: every cycle shares circumference M.
    double edge = static_cast<double>(M) / static_cast<double>(m);
    std::vector<double> d(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        int hop = std::abs(i - j);
        hop = std::min(hop, m - hop);
        d[static_cast<std::size_t>(i) * m + j] = edge * hop;
      }
    std::vector<std::string> labels(m);
    for (int i = 0; i < m; ++i) labels[i] = "c" + std::to_string(i);
    return FiniteMetricSpace::create(std::move(d), std::move(labels), tol::kInternalMetric);
  };

  SpacePtr target = make_cycle(M);
  std::vector<WalkFamilyMember> family;
  for (int m : sizes) {
    SpacePtr space = make_cycle(m);
    std::vector<double> rows(static_cast<std::size_t>(m) * m, 0.0);
    double beta = 1.0 - laziness;
    for (int i = 0; i < m; ++i) {
      rows[static_cast<std::size_t>(i) * m + i] += laziness;
      rows[static_cast<std::size_t>(i) * m + (i + 1) % m] += beta / 2.0;
      rows[static_cast<std::size_t>(i) * m + (i + m - 1) % m] += beta / 2.0;
    }
    RandomWalkKernel kernel(space, std::move(rows));

    std::vector<std::size_t> assign(m);
    for (int i = 0; i < m; ++i)
      assign[static_cast<std::size_t>(i)] =
          static_cast<std::size_t>((static_cast<long long>(i) * M) / m);
    WalkFamilyMember member{space, std::move(kernel),
                            make_approximation_map(space, target, std::move(assign)),
                            "C" + std::to_string(m)};
    family.push_back(std::move(member));
  }
  return family;
}

std::vector<WalkFamilyMember> make_path_drift_family(const std::vector<int>& sizes) {
  if (sizes.empty()) throw BadConfig("path family needs at least one size");
  for (int s : sizes)
    if (s < 2) throw BadConfig("path sizes must be >= 2");
  int M = *std::max_element(sizes.begin(), sizes.end());

  auto make_path = [](int m) -> SpacePtr {
    std::vector<double> d(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) d[static_cast<std::size_t>(i) * m + j] = std::abs(i - j);
    std::vector<std::string> labels(m);
    for (int i = 0; i < m; ++i) labels[i] = "v" + std::to_string(i);
    return FiniteMetricSpace::create(std::move(d), std::move(labels), tol::kInternalMetric);
  };

  SpacePtr target = make_path(M);
  std::vector<WalkFamilyMember> family;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    int m = sizes[k];
    SpacePtr space = make_path(m);
    // Walk mass sits in a unit window at distance 4n from the walker: the
    // family escapes every fixed window, so no subsequence can converge.
    int drift = 4 * (static_cast<int>(k) + 1);
    std::vector<double> rows(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
      int lo = std::min(i + drift, m - 1);
      int hi = std::min(i + drift + 1, m - 1);
      rows[static_cast<std::size_t>(i) * m + lo] += 0.5;
      rows[static_cast<std::size_t>(i) * m + hi] += 0.5;
    }
    RandomWalkKernel kernel(space, std::move(rows));
    std::vector<std::size_t> assign(m);
    for (int i = 0; i < m; ++i) assign[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    WalkFamilyMember member{space, std::move(kernel),
                            make_approximation_map(space, target, std::move(assign)),
                            "P" + std::to_string(m) + "+d" + std::to_string(drift)};
    family.push_back(std::move(member));
  }
  return family;
}

}  // namespace crl
