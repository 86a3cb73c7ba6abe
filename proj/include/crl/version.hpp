#pragma once

namespace crl {

inline constexpr const char* kVersion = "0.1.0";

// Central tolerance knobs. Ingested user data is held to a looser standard
// than internally computed quantities; solver-certified values sit in between.
namespace tol {
inline constexpr double kUserMetric = 1e-9;      // metric axioms on ingested matrices
inline constexpr double kInternalMetric = 1e-12; // metric axioms on computed matrices
inline constexpr double kLiftedMetric = 2e-8;    // triangle inequality of solver-built W_p matrices
inline constexpr double kMass = 1e-12;           // probability weights sum to one
inline constexpr double kMarginal = 1e-10;       // coupling marginal agreement
inline constexpr double kDualFeasibility = 1e-9; // phi(x)+psi(y) <= d(x,y)^p slack
inline constexpr double kDualGap = 1e-8;         // primal-dual agreement
inline constexpr double kOracle = 1e-9;          // solver vs brute-force agreement
inline constexpr double kContraction = 1e-8;     // contraction / envelope slack
inline constexpr double kKernelRowSum = 1e-9;    // accepted kernel row-sum error
inline constexpr double kKernelRenorm = 1e-6;    // renormalize-with-warning threshold
inline constexpr double kDedup = 1e-12;          // sup-norm dedup of coincident measures
inline constexpr double kDetailedBalance = 1e-10;
inline constexpr double kSemigroup = 1e-10;
inline constexpr double kLipschitzWitness = 1e-10;
}  // namespace tol

}  // namespace crl
