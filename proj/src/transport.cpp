#include "crl/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace crl {

namespace {

void require_exponent(double p) {
  if (!std::isfinite(p) || p < 1.0) throw UnsupportedExponent(p);
}

// Dense balanced transportation problem, primal simplex on the bipartite
// spanning-tree basis (MODI). Sizes here are desk scale, so every per-pivot
// pass is done in the obvious O(m*n) way.
class TransportSimplex {
 public:
  TransportSimplex(std::size_t m, std::size_t n, std::vector<double> supply,
                   std::vector<double> demand, const std::vector<double>& cost)
      : m_(m), n_(n), a_(std::move(supply)), b_(std::move(demand)), c_(cost) {
    balance();
    northwest_init();
  }

  void solve() {
    const std::size_t nodes = m_ + n_;
    double cmax = 1.0;
    for (double x : c_) cmax = std::max(cmax, std::abs(x));
    const double rc_tol = 1e-12 * cmax;
    const std::size_t bland_after = 200 * (nodes + m_ * n_);
    const std::size_t max_pivots = 10000 * (nodes + m_ * n_) + 10000;

    for (std::size_t pivot = 0;; ++pivot) {
      if (pivot > max_pivots)
        throw SolverFailure("transport simplex exceeded its pivot budget");
      compute_duals();
      bool bland = pivot > bland_after;
      std::size_t enter_i = npos, enter_j = npos;
      double best = -rc_tol;
      for (std::size_t i = 0; i < m_ && (enter_i == npos || !bland); ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (basic_[i * n_ + j]) continue;
          double rc = c_[i * n_ + j] - u_[i] - v_[j];
          if (rc < best) {
            best = rc;
            enter_i = i;
            enter_j = j;
            if (bland) break;
          }
        }
      }
      if (enter_i == npos) break;  // optimal
      pivot_on(enter_i, enter_j);
    }
  }

  std::vector<double> plan() const {
    std::vector<double> x(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (basic_[i * n_ + j]) x[i * n_ + j] = std::max(0.0, flow_[i * n_ + j]);
    return x;
  }

  double objective() const {
    double total = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (basic_[i * n_ + j] && flow_[i * n_ + j] > 0.0)
          total += flow_[i * n_ + j] * c_[i * n_ + j];
    return total;
  }

  const std::vector<double>& row_prices() const { return u_; }
  const std::vector<double>& col_prices() const { return v_; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void balance() {
    double sa = std::accumulate(a_.begin(), a_.end(), 0.0);
    double sb = std::accumulate(b_.begin(), b_.end(), 0.0);
    double diff = sa - sb;
    if (diff != 0.0) {
      if (std::abs(diff) > 1e-9)
        throw SolverFailure("supply/demand imbalance beyond measure tolerance");
      std::size_t jmax = static_cast<std::size_t>(
          std::max_element(b_.begin(), b_.end()) - b_.begin());
      b_[jmax] += diff;
    }
  }

  void northwest_init() {
    basic_.assign(m_ * n_, false);
    flow_.assign(m_ * n_, 0.0);
    std::vector<double> arem = a_, brem = b_;
    std::size_t i = 0, j = 0;
    while (true) {
      double t = std::min(arem[i], brem[j]);
      basic_[i * n_ + j] = true;
      flow_[i * n_ + j] = t;
      arem[i] -= t;
      brem[j] -= t;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (j == n_ - 1) ++i;
      else if (i == m_ - 1) ++j;
      else if (arem[i] <= brem[j]) ++i;
      else ++j;
    }
  }

  // Tree traversal from row node 0; the basis is always a spanning tree.
  void compute_duals() {
    const std::size_t nodes = m_ + n_;
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<bool> seen(nodes, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t node = stack.back();
      stack.pop_back();
      if (node < m_) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (!basic_[node * n_ + j] || seen[m_ + j]) continue;
          v_[j] = c_[node * n_ + j] - u_[node];
          seen[m_ + j] = true;
          stack.push_back(m_ + j);
        }
      } else {
        std::size_t j = node - m_;
        for (std::size_t i = 0; i < m_; ++i) {
          if (!basic_[i * n_ + j] || seen[i]) continue;
          u_[i] = c_[i * n_ + j] - v_[j];
          seen[i] = true;
          stack.push_back(i);
        }
      }
    }
  }

  void pivot_on(std::size_t ei, std::size_t ej) {
    // Unique tree path from row node ei to column node ej.
    const std::size_t nodes = m_ + n_;
    std::vector<std::size_t> parent(nodes, npos);
    std::vector<bool> seen(nodes, false);
    std::vector<std::size_t> queue{ei};
    seen[ei] = true;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      std::size_t node = queue[qi];
      if (node == m_ + ej) break;
      if (node < m_) {
        for (std::size_t j = 0; j < n_; ++j)
          if (basic_[node * n_ + j] && !seen[m_ + j]) {
            seen[m_ + j] = true;
            parent[m_ + j] = node;
            queue.push_back(m_ + j);
          }
      } else {
        std::size_t j = node - m_;
        for (std::size_t i = 0; i < m_; ++i)
          if (basic_[i * n_ + j] && !seen[i]) {
            seen[i] = true;
            parent[i] = m_ + j;
            queue.push_back(i);
          }
      }
    }
    if (!seen[m_ + ej]) throw SolverFailure("basis lost its spanning-tree structure");

    std::vector<std::size_t> path;  // nodes ei ... m_+ej
    for (std::size_t node = m_ + ej; node != npos; node = parent[node]) path.push_back(node);
    std::reverse(path.begin(), path.end());

    // Closed cycle: entering cell positive, then alternate backwards from the
    // column end of the path.
    struct CycleCell {
      std::size_t i, j;
      int sign;
    };
    std::vector<CycleCell> cycle;
    int sign = -1;
    for (std::size_t t = path.size() - 1; t > 0; --t) {
      std::size_t x = path[t - 1], y = path[t];
      std::size_t ci = x < m_ ? x : y;
      std::size_t cj = x < m_ ? y - m_ : x - m_;
      cycle.push_back({ci, cj, sign});
      sign = -sign;
    }

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave_i = npos, leave_j = npos;
    for (const auto& cell : cycle) {
      if (cell.sign < 0) {
        double f = flow_[cell.i * n_ + cell.j];
        if (f < theta ||
            (f == theta && (cell.i < leave_i || (cell.i == leave_i && cell.j < leave_j)))) {
          theta = f;
          leave_i = cell.i;
          leave_j = cell.j;
        }
      }
    }
    if (leave_i == npos) throw SolverFailure("pivot cycle has no leaving variable");

    for (const auto& cell : cycle)
      flow_[cell.i * n_ + cell.j] += cell.sign > 0 ? theta : -theta;
    flow_[ei * n_ + ej] = theta;
    basic_[ei * n_ + ej] = true;
    basic_[leave_i * n_ + leave_j] = false;
    flow_[leave_i * n_ + leave_j] = 0.0;
  }

  std::size_t m_, n_;
  std::vector<double> a_, b_;
  std::vector<double> c_;
  std::vector<bool> basic_;
  std::vector<double> flow_;
  std::vector<double> u_, v_;
};

struct SupportProblem {
  std::vector<std::size_t> rows;  // support of mu in the full space
  std::vector<std::size_t> cols;  // support of nu
  std::vector<double> a, b;       // restricted weights
  std::vector<double> cost;       // |rows| x |cols|, d^p
};

SupportProblem restrict_to_supports(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    double p) {
  SupportProblem sp;
  sp.rows = mu.support();
  sp.cols = nu.support();
  for (auto i : sp.rows) sp.a.push_back(mu[i]);
  for (auto j : sp.cols) sp.b.push_back(nu[j]);
  const auto& space = *mu.space();
  sp.cost.resize(sp.rows.size() * sp.cols.size());
  for (std::size_t r = 0; r < sp.rows.size(); ++r)
    for (std::size_t s = 0; s < sp.cols.size(); ++s)
      sp.cost[r * sp.cols.size() + s] = std::pow(space.distance(sp.rows[r], sp.cols[s]), p);
  return sp;
}

void check_marginals(const Coupling& coupling, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu) {
  std::size_t n = mu.size();
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += coupling.plan[i * n + j];
      col += coupling.plan[j * n + i];
    }
    if (std::abs(row - mu[i]) > tol::kMarginal || std::abs(col - nu[i]) > tol::kMarginal)
      throw SolverFailure("optimal plan violates its marginals at index " + std::to_string(i));
  }
}

}  // namespace

TransportResult optimal_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 double p) {
  require_exponent(p);
  if (!same_space(mu.space(), nu.space())) throw SpaceMismatch();
  std::size_t n = mu.size();
  // Canonical orientation: both argument orders trigger the identical solve,
  // so the reported value is exactly symmetric.
  bool swapped = nu.weights() < mu.weights();
  const DiscreteMeasure& src = swapped ? nu : mu;
  const DiscreteMeasure& dst = swapped ? mu : nu;
  SupportProblem sp = restrict_to_supports(src, dst, p);
  TransportSimplex simplex(sp.rows.size(), sp.cols.size(), sp.a, sp.b, sp.cost);
  simplex.solve();
  auto small = simplex.plan();

  TransportResult result;
  result.coupling.space = mu.space();
  result.coupling.plan.assign(n * n, 0.0);
  for (std::size_t r = 0; r < sp.rows.size(); ++r)
    for (std::size_t s = 0; s < sp.cols.size(); ++s) {
      double flow = small[r * sp.cols.size() + s];
      if (swapped) result.coupling.plan[sp.cols[s] * n + sp.rows[r]] = flow;
      else result.coupling.plan[sp.rows[r] * n + sp.cols[s]] = flow;
    }
  result.cost = std::max(0.0, simplex.objective());
  check_marginals(result.coupling, mu, nu);
  return result;
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  double cost = optimal_coupling(mu, nu, p).cost;
  return p == 1.0 ? cost : std::pow(cost, 1.0 / p);
}

DualPotentials dual_potentials(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  require_exponent(p);
  if (!same_space(mu.space(), nu.space())) throw SpaceMismatch();
  std::size_t n = mu.size();
  SupportProblem sp = restrict_to_supports(mu, nu, p);
  TransportSimplex simplex(sp.rows.size(), sp.cols.size(), sp.a, sp.b, sp.cost);
  simplex.solve();
  const auto& u = simplex.row_prices();
  const auto& v = simplex.col_prices();
  const auto& space = *mu.space();

  // c-transform extension: feasible on the whole product, value unchanged.
  DualPotentials duals;
  duals.p = p;
  duals.phi.assign(n, 0.0);
  duals.psi.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sp.cols.size(); ++s)
      best = std::min(best, std::pow(space.distance(x, sp.cols[s]), p) - v[s]);
    duals.phi[x] = best;
  }
  for (std::size_t y = 0; y < n; ++y) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < n; ++x)
      best = std::min(best, std::pow(space.distance(x, y), p) - duals.phi[x]);
    duals.psi[y] = best;
  }
  return duals;
}

double dual_value(const DualPotentials& duals, const DiscreteMeasure& mu,
                  const DiscreteMeasure& nu) {
  double value = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) value += duals.phi[i] * mu[i];
  for (std::size_t j = 0; j < nu.size(); ++j) value += duals.psi[j] * nu[j];
  return value;
}

std::vector<double> lipschitz_potential(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  // At p = 1 the c-transformed phi is a minimum of 1-Lipschitz functions,
  // hence 1-Lipschitz, and (phi, -phi) attains the same dual value.
  DualPotentials duals = dual_potentials(mu, nu, 1.0);
  return duals.phi;
}

double brute_force_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  require_exponent(p);
  if (!same_space(mu.space(), nu.space())) throw SpaceMismatch();
  SupportProblem sp = restrict_to_supports(mu, nu, p);
  std::size_t m = sp.rows.size(), n = sp.cols.size();
  if (m > 4) throw SupportTooLarge(m, 4);
  if (n > 4) throw SupportTooLarge(n, 4);

  const std::size_t cells = m * n;
  const std::size_t max_edges = m + n - 1;
  double best = std::numeric_limits<double>::infinity();

  // Every vertex of the transportation polytope is the unique flow on some
  // spanning forest of the bipartite support graph; enumerate all edge
  // subsets, peel leaves, and keep the feasible ones.
  for (std::uint32_t mask = 1; mask < (1u << cells); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_edges) continue;

    std::array<double, 4> arem{}, brem{};
    std::array<int, 4> rdeg{}, cdeg{};
    for (std::size_t i = 0; i < m; ++i) arem[i] = sp.a[i];
    for (std::size_t j = 0; j < n; ++j) brem[j] = sp.b[j];
    std::uint32_t left = mask;
    for (std::size_t e = 0; e < cells; ++e)
      if (mask & (1u << e)) {
        ++rdeg[e / n];
        ++cdeg[e % n];
      }

    double cost = 0.0;
    bool feasible = true;
    while (left != 0) {
      std::uint32_t chosen = 0;
      for (std::size_t e = 0; e < cells && chosen == 0; ++e) {
        if (!(left & (1u << e))) continue;
        std::size_t i = e / n, j = e % n;
        double flow;
        if (rdeg[i] == 1) flow = arem[i];
        else if (cdeg[j] == 1) flow = brem[j];
        else continue;
        if (flow < -1e-12) {
          feasible = false;
          break;
        }
        flow = std::max(flow, 0.0);
        cost += flow * sp.cost[e];
        arem[i] -= flow;
        brem[j] -= flow;
        --rdeg[i];
        --cdeg[j];
        chosen = 1u << e;
      }
      if (!feasible || chosen == 0) break;  // dead end or cycle in the subset
      left &= ~chosen;
    }
    if (!feasible || left != 0) continue;
    for (std::size_t i = 0; i < m; ++i)
      if (std::abs(arem[i]) > 1e-12) feasible = false;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(brem[j]) > 1e-12) feasible = false;
    if (feasible) best = std::min(best, cost);
  }
  if (!std::isfinite(best))
    throw SolverFailure("forest enumeration found no feasible vertex");
  return best;
}

}  // namespace crl
