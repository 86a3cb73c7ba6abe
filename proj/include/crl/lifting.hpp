#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "crl/curvature.hpp"
#include "crl/transport.hpp"

namespace crl {

// Finite discretization of (P_p(X), W_p): the rational simplex grid with
// denominator N, every Dirac, every kernel row, and any user extras,
// deduplicated. Dirac and kernel-row embeddings are kept addressable so both
// directions of the curvature-infimum theorem are exactly representable.
class LiftedSpace {
 public:
  SpacePtr base;
  RandomWalkKernel base_kernel;
  double p = 1.0;
  int grid_denominator = 1;

  std::vector<DiscreteMeasure> points;   // measures on the base space
  SpacePtr metric;                       // pairwise W_p, validated as a metric
  std::vector<std::size_t> dirac_index;      // base point -> lifted index of delta_x
  std::vector<std::size_t> walkpoint_index;  // base point -> lifted index of m_x

  std::size_t size() const { return points.size(); }

  LiftedSpace(SpacePtr base_space, RandomWalkKernel kernel)
      : base(std::move(base_space)), base_kernel(std::move(kernel)) {}
};

using LiftedSpacePtr = std::shared_ptr<const LiftedSpace>;

inline constexpr std::size_t kLiftedSoftCap = 5000;
inline constexpr std::size_t kLiftedHardCap = 20000;

// Builds the discretized Wasserstein space with a complete pairwise W_p
// matrix. Warns past kLiftedSoftCap points, refuses past kLiftedHardCap.
LiftedSpacePtr build_lifted_space(SpacePtr base, const RandomWalkKernel& kernel, double p,
                                  int grid_denominator,
                                  const std::vector<DiscreteMeasure>& extras = {},
                                  int threads = 1);

// The lifted walk: row of point mu is the pushforward of mu under x -> m_x,
// a purely atomic measure on the kernel-row points.
struct LiftedKernel {
  LiftedSpacePtr space;
  std::vector<std::size_t> atoms;  // lifted indices carrying kernel rows (deduped, sorted)
  std::vector<double> rows;        // size() x atoms.size(); row i = lifted walk at point i

  double at(std::size_t i, std::size_t a) const { return rows[i * atoms.size() + a]; }
  std::size_t size() const { return space->size(); }

  // Expands rows to full measures, making the lifted space a first-class
  // space-with-walk (enables double lifting and re-export).
  RandomWalkKernel as_random_walk_kernel() const;
};

LiftedKernel lift_kernel(const LiftedSpacePtr& space);

// Atoms mu(x) at the lifted point m_x: the pushforward of a base measure
// under the walk map, as a measure on the lifted space.
DiscreteMeasure lift_measure(const LiftedSpace& space, const DiscreteMeasure& base_mu);

// kappa over the lifted point set; ground cost of the outer transport is the
// precomputed lifted metric raised to p.
CurvatureReport lifted_curvature_report(const LiftedKernel& kernel, double p, int threads = 1);

struct LiftTheoremResult {
  bool holds = false;
  double base_inf = 0.0;
  double lifted_inf = 0.0;
  std::pair<std::size_t, std::size_t> witness{0, 0};  // lifted argmin pair
};

// Checks |lifted_inf - base_inf| <= tol. Both directions are exact at grid
// level, so a failure at tol = 1e-6 signals a solver bug.
LiftTheoremResult verify_lift_theorem(const CurvatureReport& base_report,
                                      const CurvatureReport& lifted_report, double tolerance);

struct InvarianceReport {
  double input_residual = 0.0;   // W_p(nu, nu * m) of the base measure
  double lifted_residual = 0.0;  // sup-norm gap of lifted invariance
  bool holds = false;
};

// Verifies that the lift of an invariant base measure is invariant under the
// lifted kernel, comparing atom-weight vectors.
InvarianceReport lifted_invariant_check(const LiftedKernel& kernel,
                                        const DiscreteMeasure& base_nu,
                                        double tolerance = 1e-8);

struct ReversibilityResult {
  bool reversible = true;
  std::size_t x = 0, y = 0;  // witness pair when not reversible
  double lhs = 0.0, rhs = 0.0;
  double max_residual = 0.0;
};

// Detailed balance m_x(y) nu(x) = m_y(x) nu(y) over all pairs.
ReversibilityResult reversibility_check(const RandomWalkKernel& kernel,
                                        const DiscreteMeasure& nu,
                                        double tolerance = tol::kDetailedBalance);

// Detailed balance of the lifted walk over kernel-row atoms, with respect to
// a measure on the lifted space (normally lift_measure(space, nu)).
ReversibilityResult lifted_reversibility_check(const LiftedKernel& kernel,
                                               const DiscreteMeasure& lifted_nu,
                                               double tolerance = tol::kDetailedBalance);

}  // namespace crl
