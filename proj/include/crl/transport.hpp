#pragma once

#include <vector>

#include "crl/measure.hpp"

namespace crl {

// Primal transportation plan between two measures on a shared space.
struct Coupling {
  SpacePtr space;
  std::vector<double> plan;  // n x n row-major; rows marginal mu, columns nu

  double at(std::size_t i, std::size_t j) const { return plan[i * space->size() + j]; }
};

// Kantorovich dual pair: phi(x) + psi(y) <= d(x,y)^p on the whole product.
// Only feasibility and a zero duality gap are contractual; the potentials are
// the solver's node prices extended by c-transform.
struct DualPotentials {
  std::vector<double> phi;
  std::vector<double> psi;
  double p = 1.0;
};

struct TransportResult {
  Coupling coupling;
  double cost = 0.0;  // sum pi d^p = W_p(mu,nu)^p
};

// Exact optimal transport with cost d(x,y)^p, solved by a network-simplex
// style pivot on the complete bipartite support graph. 1 <= p < inf.
TransportResult optimal_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

// W_p(mu, nu) = optimal cost^(1/p).
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

// Dual certificate with duality gap <= 1e-8 against the primal cost.
DualPotentials dual_potentials(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

// p = 1 normalization of the dual: a 1-Lipschitz phi with (phi, -phi) optimal.
std::vector<double> lipschitz_potential(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Independent oracle: minimal cost sum pi d^p over every spanning-forest
// basic feasible solution of the transportation polytope, enumerated
// exhaustively. Supports must have size <= 4.
double brute_force_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

double dual_value(const DualPotentials& duals, const DiscreteMeasure& mu,
                  const DiscreteMeasure& nu);

}  // namespace crl
