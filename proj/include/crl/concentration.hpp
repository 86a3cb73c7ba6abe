#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crl/curvature.hpp"
#include "crl/lifting.hpp"

namespace crl {

// Pushforward of a measure under a real observable: sorted atoms on the line.
struct LineMeasure {
  std::vector<double> support;  // strictly increasing
  std::vector<double> weights;
};

LineMeasure pushforward_line(const std::vector<double>& observable, const DiscreteMeasure& mu);

// Smallest diameter of a set carrying mass >= 1 - kappa. Contiguous windows
// of the sorted support suffice: any set's diameter dominates that of its
// spanned window.
double partial_diameter(const LineMeasure& m, double kappa);

// Largest 1-Lipschitz function below (majorant=false) or smallest above
// (majorant=true) the prescribed anchor values.
std::vector<double> mcshane_extension(const SpacePtr& space,
                                      const std::vector<std::size_t>& anchors,
                                      const std::vector<double>& values, bool majorant);

double lipschitz_constant(const SpacePtr& space, const std::vector<double>& f);

enum class ObsStrategy { distance_family, mcshane_random, local_search, exhaustive_tiny };

const char* to_string(ObsStrategy s);
ObsStrategy obs_strategy_from_string(const std::string& name);

// Certified lower bound of ObsDiam(X; -kappa) with the witness that attains
// it. The witness is checked 1-Lipschitz and its value reproduced through
// partial_diameter before being returned.
struct ObsDiamEstimate {
  double kappa = 0.0;
  double value = 0.0;
  std::vector<double> witness;
  ObsStrategy strategy = ObsStrategy::distance_family;
  bool grid_optimal = false;  // exhaustive_tiny only: best over its value grid
};

ObsDiamEstimate obs_diam(const SpacePtr& space, const DiscreteMeasure& mu, double kappa,
                         ObsStrategy strategy, std::size_t budget, std::uint64_t seed);

// inf_kappa max(ObsDiam(X;-kappa), kappa), scanned over a geometric kappa
// grid whose size grows with the budget. One witness pool is shared across
// the grid so the first arm is monotone by construction.
struct ObsDiamScalar {
  double value = 0.0;
  double kappa_at_min = 0.0;
  std::size_t grid_points = 0;
};

ObsDiamScalar obs_diam_scalar(const SpacePtr& space, const DiscreteMeasure& mu,
                              std::size_t budget, std::uint64_t seed);

struct LevyFamilyMember {
  SpacePtr space;
  DiscreteMeasure mu;
  RandomWalkKernel kernel;
  std::string name;
};

struct LevyMemberReport {
  std::string name;
  double kappa_inf = 0.0;
  ObsDiamEstimate base;
  double scaled_from_witness = 0.0;  // rescaled base witness evaluated on CX
  ObsDiamEstimate scaled_native;     // independent estimator run on CX
  ObsDiamEstimate lifted;            // lifted space with measure m_* mu
  double pullback_lipschitz = 0.0;   // Lip constant of x -> g(m_x) on the base
  double scalar_base = 0.0;
  double scalar_lifted = 0.0;
  bool lifted_le_scaled_raw = false;  // flagged, never asserted
};

struct LevyReport {
  double kappa0 = 0.0;
  double contraction = 1.0;  // C = 1 - kappa0
  double kappa = 0.0;        // the concentration parameter used
  std::vector<LevyMemberReport> members;
};

// Per member: curvature gate (>= kappa0, else CurvatureNotUniform), the base
// / scaled / lifted estimates, and the two witness-level transfers:
// rescaled witnesses scale values exactly, and every lifted witness pulls
// back to a C-Lipschitz observable on the base.
LevyReport levy_experiment(const std::vector<LevyFamilyMember>& family, double kappa0,
                           int grid_denominator, double kappa, ObsStrategy strategy,
                           std::size_t budget, std::uint64_t seed, int threads = 1);

}  // namespace crl
