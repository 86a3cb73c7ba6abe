#include <doctest.h>

#include <cmath>

#include "crl/curvature.hpp"
#include "crl/dynamics.hpp"
#include "test_helpers.hpp"

using namespace crl;

TEST_CASE("constant kernel reaches its target in one step") {
  Rng rng(401);
  auto space = testing::random_space(rng, 4);
  auto target = testing::random_measure(rng, space);
  auto constant = RandomWalkKernel::constant(target);
  auto result = invariant_measure(constant, 1.0, 1e-10, 100);
  CHECK(result.iterations <= 1);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(result.measure[i] == doctest::Approx(target[i]).epsilon(1e-10));
}

TEST_CASE("lazy swap settles on the uniform measure") {
  auto pair = testing::lazy_swap(0.3);
  auto result = invariant_measure(pair.kernel, 1.0, 1e-12, 1000);
  CHECK(result.measure[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(result.measure[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(result.residual <= 1e-12);
}

TEST_CASE("identity kernel: every start is already invariant") {
  Rng rng(403);
  auto space = testing::random_space(rng, 4);
  auto id = RandomWalkKernel::identity(space);
  auto result = invariant_measure(id, 1.0, 1e-12, 10);
  CHECK(result.iterations == 0);
  CHECK(result.residual == 0.0);
}

TEST_CASE("a kernel that never settles raises NoConvergence") {
  // Pure swap oscillates between the starting weights forever.
  auto space = FiniteMetricSpace::create({0, 1, 1, 0}, {"a", "b"});
  RandomWalkKernel swap(space, {0, 1, 1, 0});
  DiscreteMeasure start(space, {0.9, 0.1});
  CHECK_THROWS_AS(invariant_measure(swap, 1.0, 1e-10, 50, start), NoConvergence);
}

TEST_CASE("positive curvature: random starts agree pairwise within 10 tol") {
  Rng rng(407);
  auto pair = testing::lazy_swap(0.25);
  const double tolerance = 1e-9;
  std::vector<DiscreteMeasure> results;
  for (int s = 0; s < 10; ++s) {
    auto start = testing::random_measure(rng, pair.space);
    results.push_back(invariant_measure(pair.kernel, 1.0, tolerance, 10000, start).measure);
  }
  for (std::size_t i = 0; i < results.size(); ++i)
    for (std::size_t j = i + 1; j < results.size(); ++j)
      CHECK(wasserstein(results[i], results[j], 1.0) <= 10 * tolerance);
}

TEST_CASE("trace from the invariant measure is identically zero") {
  auto pair = testing::lazy_swap(0.3);
  auto nu = DiscreteMeasure::uniform(pair.space);
  auto trace = convergence_trace(pair.kernel, nu, nu, 1.0, 10, 0.6);
  for (const auto& [t, value] : trace.steps) CHECK(value <= 1e-12);
  CHECK(trace.within_envelope);
}

TEST_CASE("constant kernel trace vanishes after the first step") {
  Rng rng(409);
  auto space = testing::random_space(rng, 4);
  auto target = testing::random_measure(rng, space);
  auto constant = RandomWalkKernel::constant(target);
  auto mu0 = DiscreteMeasure::dirac(space, 0);
  auto trace = convergence_trace(constant, mu0, target, 1.0, 5, 1.0);
  CHECK(trace.steps[0].second > 0.0);
  for (std::size_t i = 1; i < trace.steps.size(); ++i)
    CHECK(trace.steps[i].second <= 1e-12);
  CHECK(trace.within_envelope);
}

TEST_CASE("lazy swap trace decays exactly like 0.5 * 0.4^t") {
  auto pair = testing::lazy_swap(0.3);
  auto nu = DiscreteMeasure::uniform(pair.space);
  auto mu0 = DiscreteMeasure::dirac(pair.space, 0);
  auto trace = convergence_trace(pair.kernel, mu0, nu, 1.0, 20, 0.6);
  for (const auto& [t, value] : trace.steps)
    CHECK(std::abs(value - 0.5 * std::pow(0.4, static_cast<double>(t))) <= 1e-9);
  CHECK(trace.within_envelope);
}

TEST_CASE("random contractive kernels respect the geometric envelope") {
  Rng rng(411);
  for (int trial = 0; trial < 5; ++trial) {
    auto space = testing::random_space(rng, 4);
    auto kernel = testing::random_kernel(rng, space);
    auto cr = curvature_report(kernel, 1.0);
    if (cr.kappa_inf <= 0.0) continue;  // Dirichlet rows are almost surely contractive
    auto nu = invariant_measure(kernel, 1.0, 1e-12, 100000).measure;
    auto mu0 = testing::random_measure(rng, space);
    auto trace = convergence_trace(kernel, mu0, nu, 1.0, 30, cr.kappa_inf);
    CHECK(trace.within_envelope);
  }
}

TEST_CASE("lifted rate check: D_t bounds and the exact lazy-swap rate") {
  auto pair = testing::lazy_swap(0.3);
  auto nu = DiscreteMeasure::uniform(pair.space);
  auto trace = lifted_rate_check(pair.kernel, nu, 1.0, 20, 0.6);
  CHECK(trace.within_envelope);
  // D_0 = sum_x nu(x) W(delta_x, nu) = 1/2 <= Diam = 1.
  CHECK(trace.steps[0].second == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t t = 0; t + 1 < trace.steps.size(); ++t) {
    double ratio = trace.steps[t + 1].second / trace.steps[t].second;
    CHECK(std::abs(ratio - 0.4) <= 1e-6);
  }
}

TEST_CASE("constant kernel: lifted distance is zero from step one") {
  Rng rng(413);
  auto space = testing::random_space(rng, 3);
  auto target = testing::random_measure(rng, space);
  auto constant = RandomWalkKernel::constant(target);
  auto trace = lifted_rate_check(constant, target, 1.0, 5, 1.0);
  for (std::size_t i = 1; i < trace.steps.size(); ++i)
    CHECK(trace.steps[i].second <= 1e-12);
}

TEST_CASE("same-rate ratio stays within its finite-space bracket") {
  Rng rng(417);
  for (int trial = 0; trial < 4; ++trial) {
    auto space = testing::random_space(rng, 4);
    auto kernel = testing::random_kernel(rng, space);
    auto cr = curvature_report(kernel, 1.0);
    if (cr.kappa_inf <= 0.0) continue;
    auto nu = invariant_measure(kernel, 1.0, 1e-12, 100000).measure;
    auto trace = lifted_rate_check(kernel, nu, 1.0, 10, cr.kappa_inf);
    double floor = *std::min_element(nu.weights().begin(), nu.weights().end());
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      if (trace.steps[i].second <= 1e-13) continue;  // both sides vanished
      CHECK(trace.sup_ratio[i] <= 1.0 + 1e-9);
      CHECK(trace.sup_ratio[i] >= floor - 1e-9);
    }
  }
}
