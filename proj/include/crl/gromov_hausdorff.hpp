#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crl/curvature.hpp"
#include "crl/transport.hpp"

namespace crl {

// A point map between finite spaces together with the least epsilon at which
// it is an epsilon-approximation (distortion + covering defect).
struct ApproximationMap {
  SpacePtr source;
  SpacePtr target;
  std::vector<std::size_t> assignment;  // source index -> target index
  double epsilon = 0.0;
};

// max( max_{x,y} |d_Y(f(x),f(y)) - d_X(x,y)| , max_y d_Y(f(X), y) ):
// the least epsilon for which both approximation conditions hold.
double check_approximation(const std::vector<std::size_t>& assignment, const SpacePtr& source,
                           const SpacePtr& target);

ApproximationMap make_approximation_map(SpacePtr source, SpacePtr target,
                                        std::vector<std::size_t> assignment);

// For each target point picks a source point mapping within f.epsilon of it
// (smallest index among admissible preimages). The returned map is verified
// to be a 3-epsilon approximation with round trips
// d_Y(y, f(f'(y))) <= eps and d_X(x, f'(f(x))) <= 2 eps; a failure of any of
// these bounds is a bug, reported as InternalInvariantViolation.
ApproximationMap quasi_inverse(const ApproximationMap& f);

// Image measure under the point map.
DiscreteMeasure pushforward(const ApproximationMap& f, const DiscreteMeasure& mu);

struct WalkFamilyMember {
  SpacePtr space;
  RandomWalkKernel kernel;
  ApproximationMap to_target;
  std::string name;
};

struct MapConvergenceReport {
  double p = 1.0;
  std::vector<double> epsilons;  // claimed epsilon per member
  // Mode with a candidate limit: per member, sup over target points x of
  // W_p((f_n)_* m^n_{x_n}, m_x).
  std::vector<double> to_candidate;
  bool candidate_ok = false;
  // Cauchy mode: moduli[a][b] = sup_x W_p(pf_a(x), pf_b(x)).
  std::vector<std::vector<double>> moduli;
  double final_modulus = 0.0;  // modulus of the last consecutive pair
  bool cauchy_pass = false;
  std::vector<std::size_t> best_subsequence;  // longest suffix chain with decreasing moduli
  // Per member and target point: the pushforward rows (the built kernels).
  std::vector<std::vector<DiscreteMeasure>> pushforwards;
};

// Compares the walks through their pushforwards onto the common target.
// With a candidate kernel, reports the distance of each member's pushforward
// map to it; without one, reports the pairwise Cauchy moduli. `tolerance`
// gates NoLiftPoint and the pass verdicts.
MapConvergenceReport map_convergence_check(const std::vector<WalkFamilyMember>& family,
                                           const std::optional<RandomWalkKernel>& candidate,
                                           double p, double tolerance, int threads = 1);

struct StabilityReport {
  double kappa0 = 0.0;
  double p = 1.0;
  std::vector<double> member_infs;
  MapConvergenceReport convergence;
  double limit_inf = 0.0;
  double tolerance = 0.0;  // 2 (final epsilon + solver tolerance)
  bool holds = false;      // limit_inf >= kappa0 - tolerance and Cauchy passed
  std::optional<RandomWalkKernel> limit_kernel;
};

// Full desk-scale stability run: asserts every member's curvature infimum is
// >= kappa0, runs the Cauchy check, takes the last pushforward as the limit
// kernel once the modulus is under tolerance, and checks its curvature.
StabilityReport stability_experiment(const std::vector<WalkFamilyMember>& family, double p,
                                     double kappa0, double cauchy_tolerance, int threads = 1);

// Canned families. Cycles are rescaled to a common circumference so the
// rounding embeddings into the largest cycle are honest approximation maps
// with epsilon shrinking as the cycle refines. The path family reproduces
// the drifting-window walks that escape every window: its pushforwards
// cannot be Cauchy.
std::vector<WalkFamilyMember> make_cycle_family(const std::vector<int>& sizes, double laziness);
std::vector<WalkFamilyMember> make_path_drift_family(const std::vector<int>& sizes);

}  // namespace crl
