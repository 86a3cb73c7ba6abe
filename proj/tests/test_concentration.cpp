#include <doctest.h>

#include <cmath>

#include "crl/concentration.hpp"
#include "test_helpers.hpp"

using namespace crl;

namespace {

// Exhaustive oracle: minimum diameter over every atom subset with enough
// mass. Subsets of a sorted support span exactly their min..max window, so
// this is the ground truth the sliding window must match.
double subset_partial_diameter(const LineMeasure& m, double kappa) {
  std::size_t n = m.support.size();
  REQUIRE(n <= 12);
  double needed = 1.0 - kappa;
  if (needed <= 1e-12) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double mass = 0.0, lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      mass += m.weights[i];
      if (first) lo = m.support[i];
      hi = m.support[i];
      first = false;
    }
    if (mass >= needed - 1e-12) best = std::min(best, hi - lo);
  }
  return std::isfinite(best) ? best : m.support.back() - m.support.front();
}

LineMeasure random_line_measure(Rng& rng, std::size_t n) {
  std::vector<double> support(n);
  double x = rng.uniform(0.0, 1.0);
  for (auto& s : support) {
    s = x;
    x += 0.01 + rng.uniform(0.0, 1.0);
  }
  LineMeasure lm;
  lm.support = std::move(support);
  lm.weights = rng.dirichlet(n);
  return lm;
}

}  // namespace

TEST_CASE("partial diameter basics") {
  LineMeasure m{{0.0, 1.0, 2.0}, {0.25, 0.5, 0.25}};
  CHECK(partial_diameter(m, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(partial_diameter(m, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(partial_diameter({{3.5}, {1.0}}, 0.0) == 0.0);
  CHECK(partial_diameter(m, 1.0) == 0.0);
  CHECK(partial_diameter(m, 2.0) == 0.0);
}

TEST_CASE("sliding window equals the exhaustive subset minimum") {
  Rng rng(601);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.index(12);
    auto m = random_line_measure(rng, n);
    double kappa = rng.uniform();
    CHECK(partial_diameter(m, kappa) ==
          doctest::Approx(subset_partial_diameter(m, kappa)).epsilon(1e-12));
  }
}

TEST_CASE("partial diameter is nonincreasing in kappa") {
  Rng rng(603);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = random_line_measure(rng, 1 + rng.index(10));
    double k1 = rng.uniform(), k2 = rng.uniform();
    if (k1 > k2) std::swap(k1, k2);
    CHECK(partial_diameter(m, k2) <= partial_diameter(m, k1) + 1e-15);
  }
}

TEST_CASE("pushforward merges equal positions and sorts the support") {
  auto space = FiniteMetricSpace::create({0, 1, 1, 1, 0, 1, 1, 1, 0});
  DiscreteMeasure mu(space, {0.2, 0.3, 0.5});
  auto lm = pushforward_line({1.0, 0.0, 1.0}, mu);
  REQUIRE(lm.support.size() == 2);
  CHECK(lm.support[0] == 0.0);
  CHECK(lm.weights[0] == doctest::Approx(0.3));
  CHECK(lm.weights[1] == doctest::Approx(0.7));
}

TEST_CASE("mcshane extensions are 1-Lipschitz and interpolate") {
  Rng rng(607);
  for (int trial = 0; trial < 30; ++trial) {
    auto space = testing::random_space(rng, 6, 2.0);
    std::vector<std::size_t> anchors{0, 3};
    std::vector<double> values{0.0, space->distance(0, 3)};  // consistent values
    for (bool majorant : {false, true}) {
      auto f = mcshane_extension(space, anchors, values, majorant);
      CHECK(lipschitz_constant(space, f) <= 1.0 + 1e-12);
      CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(f[3] == doctest::Approx(values[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("one-point space has zero observable diameter") {
  auto space = FiniteMetricSpace::create(std::vector<double>{0.0}, {"pt"});
  auto mu = DiscreteMeasure::uniform(space);
  for (double kappa : {0.05, 0.3, 0.9}) {
    auto est = obs_diam(space, mu, kappa, ObsStrategy::distance_family, 16, 1);
    CHECK(est.value == 0.0);
  }
  CHECK(obs_diam_scalar(space, mu, 128, 1).value <= 0.01);
}

TEST_CASE("two-point space: full spread below kappa=1/2, zero above") {
  auto space = FiniteMetricSpace::create({0, 1, 1, 0}, {"a", "b"});
  auto mu = DiscreteMeasure::uniform(space);
  for (auto strategy : {ObsStrategy::distance_family, ObsStrategy::mcshane_random,
                        ObsStrategy::local_search, ObsStrategy::exhaustive_tiny}) {
    auto low = obs_diam(space, mu, 0.3, strategy, 64, 5);
    CHECK(low.value == doctest::Approx(1.0).epsilon(1e-12));
    auto high = obs_diam(space, mu, 0.5, strategy, 64, 5);
    CHECK(high.value == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("every strategy returns a certified witness") {
  Rng rng(611);
  for (auto strategy : {ObsStrategy::distance_family, ObsStrategy::mcshane_random,
                        ObsStrategy::local_search, ObsStrategy::exhaustive_tiny}) {
    auto space = testing::random_space(rng, 5, 2.0);
    auto mu = testing::random_measure(rng, space);
    auto est = obs_diam(space, mu, 0.2, strategy, 200, 17);
    CHECK(lipschitz_constant(space, est.witness) <= 1.0 + tol::kLipschitzWitness);
    CHECK(partial_diameter(pushforward_line(est.witness, mu), 0.2) == est.value);
    if (strategy == ObsStrategy::exhaustive_tiny) CHECK(est.grid_optimal);
  }
}

TEST_CASE("exhaustive search is gated to five points") {
  Rng rng(613);
  auto space = testing::random_space(rng, 6);
  auto mu = testing::random_measure(rng, space);
  CHECK_THROWS_AS(obs_diam(space, mu, 0.2, ObsStrategy::exhaustive_tiny, 100, 1),
                  ExhaustiveTooLarge);
}

TEST_CASE("witness rescaling scales values exactly") {
  Rng rng(617);
  for (int trial = 0; trial < 20; ++trial) {
    auto space = testing::random_space(rng, 5, 2.0);
    auto mu = testing::random_measure(rng, space);
    double kappa = rng.uniform(0.05, 0.8);
    auto est = obs_diam(space, mu, kappa, ObsStrategy::mcshane_random, 64, trial);
    double C = 0.4;
    auto scaled = scale_space(space, C);
    DiscreteMeasure scaled_mu(scaled, mu.weights());
    std::vector<double> g = est.witness;
    for (auto& v : g) v *= C;
    CHECK(lipschitz_constant(scaled, g) <= 1.0 + tol::kLipschitzWitness);
    double scaled_value = partial_diameter(pushforward_line(g, scaled_mu), kappa);
    CHECK(std::abs(scaled_value - C * est.value) <= 1e-12);
  }
}

TEST_CASE("scalar scan: two-point space crosses at one half") {
  auto space = FiniteMetricSpace::create({0, 1, 1, 0}, {"a", "b"});
  auto mu = DiscreteMeasure::uniform(space);
  auto s = obs_diam_scalar(space, mu, 4096, 3);
  CHECK(std::abs(s.value - 0.5) <= 2e-3);
  // Metric scaled by 0.4: the crossing moves to the scaled spread.
  auto scaled = scale_space(space, 0.4);
  auto s2 = obs_diam_scalar(scaled, DiscreteMeasure::uniform(scaled), 4096, 3);
  CHECK(std::abs(s2.value - 0.4) <= 2e-3);
}

TEST_CASE("levy experiment on complete graphs with lazy uniform walks") {
  std::vector<LevyFamilyMember> family;
  double laziness = 0.3;
  for (int n : {3, 5, 8}) {
    std::vector<double> d(static_cast<std::size_t>(n) * n, 1.0);
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i) * n + i] = 0.0;
    auto space = FiniteMetricSpace::create(std::move(d));
    std::vector<double> rows(static_cast<std::size_t>(n) * n,
                             (1.0 - laziness) / static_cast<double>(n));
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i) * n + i] += laziness;
    family.push_back({space, DiscreteMeasure::uniform(space),
                      RandomWalkKernel(space, std::move(rows)), "K" + std::to_string(n)});
  }
  // m_x - m_y = laziness (delta_x - delta_y), so kappa_1 = 1 - laziness
  // uniformly over the complete graph.
  double kappa0 = 1.0 - laziness;
  auto report = levy_experiment(family, kappa0, 2, 0.25, ObsStrategy::mcshane_random, 64, 9);
  REQUIRE(report.members.size() == 3);
  for (const auto& m : report.members) {
    CHECK(m.kappa_inf == doctest::Approx(kappa0).epsilon(1e-10));
    CHECK(std::abs(m.scaled_from_witness - report.contraction * m.base.value) <= 1e-12);
    CHECK(m.pullback_lipschitz <= report.contraction + tol::kContraction);
  }
}

TEST_CASE("levy experiment rejects a family below the claimed bound") {
  auto pair = testing::lazy_swap(0.3);  // kappa_inf = 0.6
  std::vector<LevyFamilyMember> family{
      {pair.space, DiscreteMeasure::uniform(pair.space), pair.kernel, "swap"}};
  CHECK_THROWS_AS(
      levy_experiment(family, 0.9, 2, 0.25, ObsStrategy::distance_family, 16, 1),
      CurvatureNotUniform);
}

TEST_CASE("constant-kernel member collapses the lifted estimates") {
  Rng rng(619);
  auto space = testing::random_space(rng, 3);
  auto target = testing::random_measure(rng, space);
  std::vector<LevyFamilyMember> family{
      {space, DiscreteMeasure::uniform(space), RandomWalkKernel::constant(target), "const"}};
  auto report = levy_experiment(family, 1.0 - 1e-9, 2, 0.25,
                                ObsStrategy::distance_family, 16, 1);
  CHECK(report.members[0].lifted.value == doctest::Approx(0.0).epsilon(1e-12));
}
