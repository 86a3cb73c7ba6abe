#include <doctest.h>

#include <cmath>

#include "crl/transport.hpp"
#include "test_helpers.hpp"

using namespace crl;

namespace {

// The canonical 2x2 instance: d = 1, mu = (0.7, 0.3), nu = (0.3, 0.7).
// The transportation polytope has vertices x_aa in {0, 0.3}; the cheap one
// keeps 0.3 + 0.3 in place and moves 0.4 across, cost 0.4 * 1^p.
struct TwoPoint {
  SpacePtr space = FiniteMetricSpace::create({0, 1, 1, 0}, {"a", "b"});
  DiscreteMeasure mu{space, {0.7, 0.3}};
  DiscreteMeasure nu{space, {0.3, 0.7}};
};

}  // namespace

TEST_CASE("oracle reproduces the hand-checked 2x2 vertex minimum") {
  TwoPoint t;
  CHECK(brute_force_wasserstein(t.mu, t.nu, 1.0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(brute_force_wasserstein(t.mu, t.nu, 2.0) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("oracle on Diracs gives d^p, and zero on equal measures") {
  Rng rng(101);
  auto space = testing::random_space(rng, 4);
  auto da = DiscreteMeasure::dirac(space, 0);
  auto db = DiscreteMeasure::dirac(space, 2);
  for (double p : {1.0, 1.5, 2.0})
    CHECK(brute_force_wasserstein(da, db, p) ==
          doctest::Approx(std::pow(space->distance(0, 2), p)).epsilon(1e-14));
  auto mu = testing::random_sparse_measure(rng, space, 3);
  CHECK(brute_force_wasserstein(mu, mu, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("oracle rejects supports larger than four") {
  Rng rng(103);
  auto space = testing::random_space(rng, 6);
  auto mu = testing::random_measure(rng, space);
  auto nu = testing::random_measure(rng, space);
  CHECK_THROWS_AS(brute_force_wasserstein(mu, nu, 1.0), SupportTooLarge);
}

TEST_CASE("optimal_coupling matches the canonical example and returns a valid plan") {
  TwoPoint t;
  auto result = optimal_coupling(t.mu, t.nu, 1.0);
  CHECK(result.cost == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(result.coupling.at(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(result.coupling.at(0, 1) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(result.coupling.at(1, 1) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("Dirac-to-Dirac plans have a single cell") {
  Rng rng(107);
  auto space = testing::random_space(rng, 5);
  auto result = optimal_coupling(DiscreteMeasure::dirac(space, 1),
                                 DiscreteMeasure::dirac(space, 3), 2.0);
  CHECK(result.coupling.at(1, 3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(result.cost == doctest::Approx(std::pow(space->distance(1, 3), 2.0)).epsilon(1e-13));
}

TEST_CASE("identical measures transport for free") {
  Rng rng(109);
  auto space = testing::random_space(rng, 5);
  auto mu = testing::random_measure(rng, space);
  CHECK(optimal_coupling(mu, mu, 1.7).cost == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(wasserstein(mu, convolve(mu, RandomWalkKernel::identity(space)), 2.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("W_2 of the canonical example is sqrt(0.4)") {
  TwoPoint t;
  CHECK(wasserstein(t.mu, t.nu, 2.0) ==
        doctest::Approx(0.63245553203367588).epsilon(1e-12));
  CHECK(wasserstein(DiscreteMeasure::dirac(t.space, 0), DiscreteMeasure::dirac(t.space, 1),
                    3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solver agrees with the oracle on random small-support instances") {
  Rng rng(113);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 4 + rng.index(4);
    auto space = testing::random_space(rng, n, 2.0);
    auto mu = testing::random_sparse_measure(rng, space, 1 + rng.index(4));
    auto nu = testing::random_sparse_measure(rng, space, 1 + rng.index(4));
    double p = 1.0 + 2.0 * rng.uniform();
    double solver = optimal_coupling(mu, nu, p).cost;
    double oracle = brute_force_wasserstein(mu, nu, p);
    CHECK(std::abs(solver - oracle) <= tol::kOracle);
  }
}

TEST_CASE("every solved instance carries exact marginals and a tight dual") {
  Rng rng(127);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + rng.index(6);
    auto space = testing::random_space(rng, n, 3.0);
    auto mu = testing::random_measure(rng, space);
    auto nu = testing::random_measure(rng, space);
    double p = trial % 2 == 0 ? 1.0 : 2.0;

    auto primal = optimal_coupling(mu, nu, p);
    auto duals = dual_potentials(mu, nu, p);
    // Feasibility on the full product.
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        CHECK(duals.phi[x] + duals.psi[y] <=
              std::pow(space->distance(x, y), p) + tol::kDualFeasibility);
    CHECK(std::abs(dual_value(duals, mu, nu) - primal.cost) <= tol::kDualGap);
  }
}

TEST_CASE("Dirac pair binds the single dual constraint") {
  Rng rng(131);
  auto space = testing::random_space(rng, 4);
  auto da = DiscreteMeasure::dirac(space, 0);
  auto db = DiscreteMeasure::dirac(space, 2);
  auto duals = dual_potentials(da, db, 2.0);
  double dp = std::pow(space->distance(0, 2), 2.0);
  CHECK(duals.phi[0] + duals.psi[2] == doctest::Approx(dp).epsilon(1e-10));
}

TEST_CASE("p=1 potentials normalize to a 1-Lipschitz Kantorovich witness") {
  Rng rng(137);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng.index(6);
    auto space = testing::random_space(rng, n, 2.0);
    auto mu = testing::random_measure(rng, space);
    auto nu = testing::random_measure(rng, space);
    auto phi = lipschitz_potential(mu, nu);
    double lip = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y)
        lip = std::max(lip, std::abs(phi[x] - phi[y]) / space->distance(x, y));
    CHECK(lip <= 1.0 + 1e-9);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += phi[i] * (mu[i] - nu[i]);
    CHECK(std::abs(value - wasserstein(mu, nu, 1.0)) <= tol::kDualGap);
  }
}

TEST_CASE("wasserstein is symmetric, separated, and triangular") {
  Rng rng(139);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + rng.index(5);
    auto space = testing::random_space(rng, n, 2.0);
    auto a = testing::random_measure(rng, space);
    auto b = testing::random_measure(rng, space);
    auto c = testing::random_measure(rng, space);
    double p = 1.0 + rng.uniform();
    double ab = wasserstein(a, b, p);
    CHECK(wasserstein(b, a, p) == ab);  // canonical orientation: exact symmetry
    CHECK(ab > 0.0);  // Dirichlet samples are a.s. distinct
    CHECK(ab <= wasserstein(a, c, p) + wasserstein(c, b, p) + 2e-8);
  }
}

TEST_CASE("W_p is monotone in p") {
  Rng rng(149);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + rng.index(5);
    auto space = testing::random_space(rng, n, 2.0);
    auto a = testing::random_measure(rng, space);
    auto b = testing::random_measure(rng, space);
    double p = 1.0 + rng.uniform(0.0, 2.0);
    double q = p + rng.uniform(0.0, 2.0);
    CHECK(wasserstein(a, b, p) <= wasserstein(a, b, q) + 1e-10);
  }
}

TEST_CASE("invalid exponents and mismatched spaces are rejected") {
  TwoPoint t;
  CHECK_THROWS_AS(wasserstein(t.mu, t.nu, 0.5), UnsupportedExponent);
  CHECK_THROWS_AS(wasserstein(t.mu, t.nu, std::numeric_limits<double>::infinity()),
                  UnsupportedExponent);
  Rng rng(151);
  auto other = testing::random_space(rng, 2);
  CHECK_THROWS_AS(wasserstein(t.mu, DiscreteMeasure::uniform(other), 1.0), SpaceMismatch);
}
