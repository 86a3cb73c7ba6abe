#include "crl/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "crl/logging.hpp"
#include "crl/parallel.hpp"

namespace crl {

namespace {

// Number of compositions of N into n parts, saturating at the hard cap.
std::size_t grid_size_capped(std::size_t n, int N) {
  double count = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    count *= static_cast<double>(N + k) / static_cast<double>(k);
    if (count > 4.0 * static_cast<double>(kLiftedHardCap)) return kLiftedHardCap + 1;
  }
  return static_cast<std::size_t>(count + 0.5);
}

// Compositions of N into n nonnegative parts, lexicographic by leading part.
void enumerate_grid(std::size_t n, int N, std::vector<std::vector<double>>& out) {
  std::vector<int> parts(n, 0);
  std::vector<double> w(n);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int rem) {
    if (i + 1 == n) {
      parts[i] = rem;
      for (std::size_t k = 0; k < n; ++k)
        w[k] = static_cast<double>(parts[k]) / static_cast<double>(N);
      out.push_back(w);
      return;
    }
    for (int take = rem; take >= 0; --take) {
      parts[i] = take;
      rec(i + 1, rem - take);
    }
  };
  rec(0, N);
}

// %.17g round-trips doubles, so distinct weight vectors get distinct labels.
std::string measure_label(const std::vector<double>& w) {
  std::string s = "mu[";
  char buf[40];
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", w[i]);
    if (i) s += ",";
    s += buf;
  }
  s += "]";
  return s;
}

}  // namespace

LiftedSpacePtr build_lifted_space(SpacePtr base, const RandomWalkKernel& kernel, double p,
                                  int grid_denominator,
                                  const std::vector<DiscreteMeasure>& extras, int threads) {
  if (grid_denominator < 1) throw BadConfig("grid denominator must be >= 1");
  if (!same_space(base, kernel.space())) throw SpaceMismatch();
  std::size_t n = base->size();

  auto lifted = std::make_shared<LiftedSpace>(base, kernel);
  lifted->p = p;
  lifted->grid_denominator = grid_denominator;

  std::size_t projected = grid_size_capped(n, grid_denominator) + 2 * n + extras.size();
  if (projected > kLiftedHardCap) throw GridTooLarge(projected, kLiftedHardCap);
  if (projected > kLiftedSoftCap)
    log::warn("lifted space will have about " + std::to_string(projected) +
              " points; the metric fill is O(M^2) transport solves");

  std::vector<std::vector<double>> raw;
  enumerate_grid(n, grid_denominator, raw);
  for (std::size_t x = 0; x < n; ++x) {  // Diracs (grid already has them; dedup collapses)
    std::vector<double> w(n, 0.0);
    w[x] = 1.0;
    raw.push_back(std::move(w));
  }
  for (std::size_t x = 0; x < n; ++x) {
    const auto& m = kernel.matrix();
    raw.emplace_back(m.begin() + static_cast<std::ptrdiff_t>(x * n),
                     m.begin() + static_cast<std::ptrdiff_t>((x + 1) * n));
  }
  for (const auto& extra : extras) {
    if (!same_space(extra.space(), base)) throw SpaceMismatch();
    raw.push_back(extra.weights());
  }

  // Dedup coincident measures (sup-norm), keeping first occurrence order.
  std::vector<std::vector<double>> unique_pts;
  std::vector<std::size_t> where(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    std::size_t found = unique_pts.size();
    for (std::size_t u = 0; u < unique_pts.size(); ++u) {
      double gap = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        gap = std::max(gap, std::abs(raw[r][i] - unique_pts[u][i]));
      if (gap <= tol::kDedup) {
        found = u;
        break;
      }
    }
    if (found == unique_pts.size()) unique_pts.push_back(raw[r]);
    where[r] = found;
  }

  std::size_t M = unique_pts.size();
  std::size_t grid_count = raw.size() - 2 * n - extras.size();
  lifted->dirac_index.resize(n);
  lifted->walkpoint_index.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    lifted->dirac_index[x] = where[grid_count + x];
    lifted->walkpoint_index[x] = where[grid_count + n + x];
  }

  lifted->points.reserve(M);
  std::vector<std::string> labels(M);
  for (std::size_t u = 0; u < M; ++u) {
    labels[u] = measure_label(unique_pts[u]);
    lifted->points.emplace_back(base, unique_pts[u]);
  }

  // O(M^2) metric fill; each entry is one exact transport solve.
  std::vector<double> metric(M * M, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(M * (M - 1) / 2);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i + 1; j < M; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), threads, [&](std::size_t idx) {
    auto [i, j] = pairs[idx];
    double w = wasserstein(lifted->points[i], lifted->points[j], p);
    metric[i * M + j] = w;
    metric[j * M + i] = w;
  });

  auto validation = validate_space_flat(metric, M, labels, tol::kLiftedMetric);
  if (!validation.ok()) {
    std::string msg = "lifted W_p matrix failed metric validation:";
    for (const auto& v : validation.violations) msg += " " + v.describe() + ";";
    throw SolverFailure(msg);
  }
  lifted->metric = validation.space;
  return lifted;
}

LiftedKernel lift_kernel(const LiftedSpacePtr& space) {
  LiftedKernel lk;
  lk.space = space;
  std::size_t n = space->base->size();
  std::size_t M = space->size();

  lk.atoms = space->walkpoint_index;
  std::sort(lk.atoms.begin(), lk.atoms.end());
  lk.atoms.erase(std::unique(lk.atoms.begin(), lk.atoms.end()), lk.atoms.end());
  std::map<std::size_t, std::size_t> atom_slot;
  for (std::size_t a = 0; a < lk.atoms.size(); ++a) atom_slot[lk.atoms[a]] = a;

  lk.rows.assign(M * lk.atoms.size(), 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    const auto& mu = space->points[i];
    for (std::size_t x = 0; x < n; ++x) {
      if (mu[x] == 0.0) continue;
      lk.rows[i * lk.atoms.size() + atom_slot[space->walkpoint_index[x]]] += mu[x];
    }
  }
  return lk;
}

RandomWalkKernel LiftedKernel::as_random_walk_kernel() const {
  std::size_t M = space->size();
  std::vector<double> full(M * M, 0.0);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t a = 0; a < atoms.size(); ++a) full[i * M + atoms[a]] = at(i, a);
  return RandomWalkKernel(space->metric, std::move(full));
}

DiscreteMeasure lift_measure(const LiftedSpace& space, const DiscreteMeasure& base_mu) {
  if (!same_space(base_mu.space(), space.base)) throw SpaceMismatch();
  std::vector<double> w(space.size(), 0.0);
  for (std::size_t x = 0; x < base_mu.size(); ++x)
    w[space.walkpoint_index[x]] += base_mu[x];
  return DiscreteMeasure(space.metric, std::move(w));
}

CurvatureReport lifted_curvature_report(const LiftedKernel& kernel, double p, int threads) {
  const LiftedSpace& ls = *kernel.space;
  std::size_t M = ls.size();
  std::size_t A = kernel.atoms.size();

  // Ground space of the outer transport: the kernel-row atoms with the
  // precomputed lifted metric. Rows become measures on this small space.
  std::vector<double> atom_metric(A * A);
  std::vector<std::string> atom_labels(A);
  for (std::size_t a = 0; a < A; ++a) {
    atom_labels[a] = ls.metric->label(kernel.atoms[a]);
    for (std::size_t b = 0; b < A; ++b)
      atom_metric[a * A + b] = ls.metric->distance(kernel.atoms[a], kernel.atoms[b]);
  }
  SpacePtr atom_space =
      A == 1 ? nullptr
             : FiniteMetricSpace::create(atom_metric, atom_labels, tol::kLiftedMetric);

  CurvatureReport report;
  report.p = p;
  report.n = M;
  report.kappa_matrix.assign(M * M, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(M * (M - 1) / 2);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i + 1; j < M; ++j) pairs.emplace_back(i, j);

  parallel_for(pairs.size(), threads, [&](std::size_t idx) {
    auto [i, j] = pairs[idx];
    double w;
    if (A == 1) {
      w = 0.0;  // every lifted row is the same Dirac
    } else {
      DiscreteMeasure ri(atom_space,
                         std::vector<double>(kernel.rows.begin() + static_cast<std::ptrdiff_t>(i * A),
                                             kernel.rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * A)));
      DiscreteMeasure rj(atom_space,
                         std::vector<double>(kernel.rows.begin() + static_cast<std::ptrdiff_t>(j * A),
                                             kernel.rows.begin() + static_cast<std::ptrdiff_t>((j + 1) * A)));
      w = wasserstein(ri, rj, p);
    }
    double k = 1.0 - w / ls.metric->distance(i, j);
    report.kappa_matrix[i * M + j] = k;
    report.kappa_matrix[j * M + i] = k;
  });

  bool first = true;
  for (auto [i, j] : pairs) {
    double k = report.kappa_matrix[i * M + j];
    if (first || k < report.kappa_inf) {
      report.kappa_inf = k;
      report.argmin_pair = {i, j};
    }
    if (first || k > report.kappa_sup) report.kappa_sup = k;
    first = false;
  }
  return report;
}

LiftTheoremResult verify_lift_theorem(const CurvatureReport& base_report,
                                      const CurvatureReport& lifted_report, double tolerance) {
  if (base_report.p != lifted_report.p)
    throw BadConfig("theorem check requires both reports at the same exponent");
  LiftTheoremResult result;
  result.base_inf = base_report.kappa_inf;
  result.lifted_inf = lifted_report.kappa_inf;
  result.witness = lifted_report.argmin_pair;
  bool lower = result.lifted_inf >= result.base_inf - tolerance;
  bool upper = result.lifted_inf <= result.base_inf + tolerance;
  result.holds = lower && upper;
  if (!lower)
    log::info("lifted infimum fell below the base infimum by " +
              std::to_string(result.base_inf - result.lifted_inf) +
              " (beyond tolerance; logging per run)");
  return result;
}

InvarianceReport lifted_invariant_check(const LiftedKernel& kernel,
                                        const DiscreteMeasure& base_nu, double tolerance) {
  const LiftedSpace& ls = *kernel.space;
  InvarianceReport report;
  report.input_residual = wasserstein(base_nu, convolve(base_nu, ls.base_kernel), ls.p);
  if (report.input_residual > tolerance) throw NotInvariantInput(report.input_residual);

  // nu-tilde as atom weights, then one step of the lifted walk:
  // (nu-tilde * m-tilde) = sum_i nu-tilde(i) m-tilde_{point_i}.
  DiscreteMeasure lifted_nu = lift_measure(ls, base_nu);
  std::size_t A = kernel.atoms.size();
  std::vector<double> stepped(ls.size(), 0.0);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (lifted_nu[i] == 0.0) continue;
    for (std::size_t a = 0; a < A; ++a)
      stepped[kernel.atoms[a]] += lifted_nu[i] * kernel.at(i, a);
  }
  double gap = 0.0;
  for (std::size_t i = 0; i < ls.size(); ++i)
    gap = std::max(gap, std::abs(stepped[i] - lifted_nu[i]));
  report.lifted_residual = gap;
  report.holds = gap <= tolerance;
  return report;
}

ReversibilityResult reversibility_check(const RandomWalkKernel& kernel,
                                        const DiscreteMeasure& nu, double tolerance) {
  if (!same_space(kernel.space(), nu.space())) throw SpaceMismatch();
  ReversibilityResult result;
  std::size_t n = kernel.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      double lhs = kernel.at(x, y) * nu[x];
      double rhs = kernel.at(y, x) * nu[y];
      double gap = std::abs(lhs - rhs);
      if (gap > result.max_residual) {
        result.max_residual = gap;
        if (gap > tolerance && result.reversible) {
          result.reversible = false;
          result.x = x;
          result.y = y;
          result.lhs = lhs;
          result.rhs = rhs;
        }
      }
    }
  result.reversible = result.max_residual <= tolerance;
  return result;
}

ReversibilityResult lifted_reversibility_check(const LiftedKernel& kernel,
                                               const DiscreteMeasure& lifted_nu,
                                               double tolerance) {
  if (!same_space(lifted_nu.space(), kernel.space->metric)) throw SpaceMismatch();
  ReversibilityResult result;
  std::size_t A = kernel.atoms.size();
  // Mass only ever sits on kernel-row atoms, so detailed balance over atom
  // pairs is the whole statement.
  for (std::size_t ai = 0; ai < A; ++ai)
    for (std::size_t bi = ai + 1; bi < A; ++bi) {
      std::size_t i = kernel.atoms[ai], j = kernel.atoms[bi];
      double lhs = kernel.at(i, bi) * lifted_nu[i];
      double rhs = kernel.at(j, ai) * lifted_nu[j];
      double gap = std::abs(lhs - rhs);
      if (gap > result.max_residual) {
        result.max_residual = gap;
        if (gap > tolerance && result.reversible) {
          result.reversible = false;
          result.x = i;
          result.y = j;
          result.lhs = lhs;
          result.rhs = rhs;
        }
      }
    }
  result.reversible = result.max_residual <= tolerance;
  return result;
}

}  // namespace crl
