#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rwre/env_field.hpp"
#include "rwre/oracle.hpp"
#include "rwre/walker.hpp"

using namespace rwre;

namespace {

const ConductanceLaw kLaw = ConductanceLaw::two_point(1.0, 4.0, 0.5);

}  // namespace

TEST_CASE("discrete walk: one step per unit time, bipartite parity") {
  for (const std::int64_t t : {1, 5, 8, 33}) {
    for (std::uint64_t i = 0; i < 500; ++i) {
      const EnvironmentField field(kLaw, 2, 71, i);
      WalkRng rng(71, i, kTagDiscreteWalk);
      const WalkOutcome out = run_discrete_walk(field, rng, t);
      CHECK(out.final_position.l1_norm(2) <= t);
      CHECK(((out.final_position.coord_sum(2) % 2 + 2) % 2) == (t % 2));
      CHECK(out.origin_weight >= 4.0);
      CHECK(out.origin_weight <= 16.0);
      CHECK(out.jumps == static_cast<std::uint64_t>(t));
      CHECK(out.draws == static_cast<std::uint64_t>(t) * 5);
      if (t == 1) CHECK(out.final_position.l1_norm(2) == 1);
    }
  }
}

TEST_CASE("discrete walk is a pure function of (field, stream key, horizon)") {
  const EnvironmentField field(kLaw, 2, 123, 9);
  WalkRng rng1(123, 9, kTagDiscreteWalk);
  WalkRng rng2(123, 9, kTagDiscreteWalk);
  const WalkOutcome a = run_discrete_walk(field, rng1, 25);
  const WalkOutcome b = run_discrete_walk(field, rng2, 25);
  CHECK(a.final_position == b.final_position);
  CHECK(a.origin_weight == b.origin_weight);
  CHECK(a.draws == b.draws);

  WalkRng rng3(123, 10, kTagDiscreteWalk);  // different stream
  const WalkOutcome c = run_discrete_walk(field, rng3, 25);
  const bool same = c.final_position == a.final_position;
  CHECK_FALSE(same);  // 25-step paths colliding by chance is ~impossible

  // The two walk kinds use disjoint decision streams under one key.
  WalkRng y(123, 9, kTagDiscreteWalk);
  WalkRng x(123, 9, kTagContinuousWalk);
  CHECK(y.next_unit() != x.next_unit());
}

TEST_CASE("t=1 under a constant law is uniform over the four neighbours") {
  const ConductanceLaw constant = ConductanceLaw::constant(1.0);
  std::array<std::uint64_t, 4> counts{};
  const std::uint64_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const EnvironmentField field(constant, 2, 4, i);
    WalkRng rng(4, i, kTagDiscreteWalk);
    const WalkOutcome out = run_discrete_walk(field, rng, 1);
    const Site& p = out.final_position;
    if (p[0] == 1) ++counts[0];
    else if (p[0] == -1) ++counts[1];
    else if (p[1] == 1) ++counts[2];
    else ++counts[3];
  }
  const double se = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
  for (const std::uint64_t c : counts)
    CHECK(std::fabs(static_cast<double>(c) / static_cast<double>(n) - 0.25) < 5 * se);
}

TEST_CASE("step distribution: normalization, bounds, and hand recomputation") {
  const EnvironmentField field(kLaw, 2, 55, 8);
  for (std::int64_t x = -10; x <= 10; ++x) {
    for (std::int64_t y = -10; y <= 10; y += 2) {
      Site s;
      s[0] = x;
      s[1] = y;
      const auto probs = step_distribution(field, s);
      const auto w = field.neighbor_weights(s);
      long double sum = 0;
      double total = 0;
      for (int k = 0; k < 4; ++k) total += w[static_cast<std::size_t>(k)];
      for (int k = 0; k < 4; ++k) {
        CHECK(probs[static_cast<std::size_t>(k)] == w[static_cast<std::size_t>(k)] / total);
        CHECK(probs[static_cast<std::size_t>(k)] >= 1.0 / 16.0);
        CHECK(probs[static_cast<std::size_t>(k)] <= 1.0);
        sum += probs[static_cast<std::size_t>(k)];
      }
      // Entries sum to 1 within one unit in the last place.
      CHECK(std::fabs(static_cast<double>(sum - 1.0L)) <= 2.3e-16);
    }
  }

  const EnvironmentField flat(ConductanceLaw::constant(2.5), 2, 1, 0);
  const auto probs = step_distribution(flat, Site{});
  for (int k = 0; k < 4; ++k) CHECK(probs[static_cast<std::size_t>(k)] == 0.25);
}

TEST_CASE("incident conductances (1,1,4,4) give probabilities (0.1,0.1,0.4,0.4)") {
  const EnvironmentField field(kLaw, 2, 9091, 0);
  bool found = false;
  for (std::int64_t x = 0; x < 200 && !found; ++x) {
    Site s;
    s[0] = x;
    s[1] = -x;
    const auto w = field.neighbor_weights(s);
    if (w[0] == 1.0 && w[1] == 1.0 && w[2] == 4.0 && w[3] == 4.0) {
      found = true;
      const auto probs = step_distribution(field, s);
      CHECK(probs[0] == 1.0 / 10.0);
      CHECK(probs[1] == 1.0 / 10.0);
      CHECK(probs[2] == 4.0 / 10.0);
      CHECK(probs[3] == 4.0 / 10.0);
    }
  }
  CHECK(found);  // pattern probability 1/16 per site; 200 tries miss with p ~ 4e-6
}

TEST_CASE("empirical law of Y(8) in one fixed environment matches the exact kernel") {
  const std::uint64_t seed = 2026;
  const EnvironmentField field(kLaw, 2, seed, 3);
  const std::int64_t t = 8;
  const ExactKernel kernel = exact_distribution(field, t);

  const std::int64_t side = 2 * t + 1;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(side * side), 0);
  const std::uint64_t n = 1000000;
  for (std::uint64_t i = 0; i < n; ++i) {
    WalkRng rng(seed, i, kTagDiscreteWalk);
    const WalkOutcome out = run_discrete_walk(field, rng, t);
    const std::int64_t ix = out.final_position[0] + t;
    const std::int64_t iy = out.final_position[1] + t;
    ++counts[static_cast<std::size_t>(ix * side + iy)];
  }

  double tv = 0;
  for (std::int64_t ix = 0; ix < side; ++ix) {
    for (std::int64_t iy = 0; iy < side; ++iy) {
      Site s;
      s[0] = ix - t;
      s[1] = iy - t;
      const double emp =
          static_cast<double>(counts[static_cast<std::size_t>(ix * side + iy)]) / static_cast<double>(n);
      tv += std::fabs(emp - kernel.probability(s));
    }
  }
  tv *= 0.5;
  CHECK(tv < 0.01);
}

TEST_CASE("continuous walk under a constant law: directional variance and jump rate") {
  const double c = 2.0;
  const ConductanceLaw constant = ConductanceLaw::constant(c);
  const Direction xi = Direction::axis(0, 2);
  const double t = 10.0;
  const std::uint64_t n = 100000;
  double sum = 0, sum_sq = 0, jump_sum = 0, jump_sq = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const EnvironmentField field(constant, 2, 17, i);
    WalkRng rng(17, i, kTagContinuousWalk);
    const WalkOutcome out = run_continuous_walk(field, rng, t);
    const double q = xi.dot(out.final_position);
    const double v = q * q / t;
    sum += v;
    sum_sq += v * v;
    const double j = static_cast<double>(out.jumps);
    jump_sum += j;
    jump_sq += j * j;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double se = std::sqrt((sum_sq / nn - mean * mean) / nn);
  // E[(xi.X(t))^2]/t = 2c for the rate-c lattice walk.
  CHECK(std::fabs(mean - 2.0 * c) < 5 * se);

  const double jmean = jump_sum / nn;
  const double jse = std::sqrt((jump_sq / nn - jmean * jmean) / nn);
  CHECK(std::fabs(jmean - mean_site_weight(constant, 2) * t) < 5 * jse);
}

TEST_CASE("continuous walk jump count concentrates on E[p] t for the random law") {
  const double t = 10.0;
  const std::uint64_t n = 10000;
  double jump_sum = 0, jump_sq = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const EnvironmentField field(kLaw, 2, 29, i);
    WalkRng rng(29, i, kTagContinuousWalk);
    const WalkOutcome out = run_continuous_walk(field, rng, t);
    const double j = static_cast<double>(out.jumps);
    jump_sum += j;
    jump_sq += j * j;
  }
  const double nn = static_cast<double>(n);
  const double jmean = jump_sum / nn;
  const double jse = std::sqrt((jump_sq / nn - jmean * jmean) / nn);
  // The environment seen from X is stationary from time 0, so the expected
  // jump count is exactly E[p] t.
  CHECK(std::fabs(jmean - mean_site_weight(kLaw, 2) * t) < 5 * jse);
}

TEST_CASE("continuous walk at t -> 0+ stays at the origin") {
  std::uint64_t moved = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const EnvironmentField field(kLaw, 2, 41, i);
    WalkRng rng(41, i, kTagContinuousWalk);
    const WalkOutcome out = run_continuous_walk(field, rng, 1e-6);
    if (out.final_position.l1_norm(2) != 0) ++moved;
  }
  // P[jump] <= 16 * 1e-6 per walk; 10^4 walks leave ~0.16 expected movers.
  CHECK(moved <= 3);

  const EnvironmentField field(kLaw, 2, 41, 0);
  WalkRng rng(41, 0, kTagContinuousWalk);
  CHECK_THROWS_AS(run_continuous_walk(field, rng, 0.0), std::invalid_argument);
  WalkRng rng2(41, 0, kTagDiscreteWalk);
  CHECK_THROWS_AS(run_discrete_walk(field, rng2, 0), std::invalid_argument);
}

TEST_CASE("trace mode records every visited site") {
  const EnvironmentField field(kLaw, 2, 77, 5);
  WalkRng rng(77, 5, kTagDiscreteWalk);
  std::vector<Site> path;
  const WalkOutcome out = run_discrete_walk(field, rng, 7, &path);
  REQUIRE(path.size() == 8);
  CHECK(path.front().l1_norm(2) == 0);
  CHECK(path.back() == out.final_position);
  for (std::size_t i = 1; i < path.size(); ++i) {
    std::int64_t step = 0;
    for (int a = 0; a < 2; ++a) step += std::llabs(path[i][a] - path[i - 1][a]);
    CHECK(step == 1);
  }

  WalkRng rngx(77, 5, kTagContinuousWalk);
  std::vector<Site> xpath;
  const WalkOutcome xout = run_continuous_walk(field, rngx, 3.0, &xpath);
  CHECK(xpath.size() == xout.jumps + 1);
  CHECK(xpath.back() == xout.final_position);
}

TEST_CASE("heat-kernel tails decay and the exponential moment is stable in t") {
  const double lambda = 0.05;
  const std::uint64_t n = 1000000;
  std::vector<double> exp_moments;
  for (const std::int64_t t : {16, 64, 256}) {
    const double sqrt_t = std::sqrt(static_cast<double>(t));
    std::uint64_t at2 = 0, at4 = 0;
    double exp_sum = 0;
    const std::uint64_t env_base = static_cast<std::uint64_t>(t) << 48;
    for (std::uint64_t i = 0; i < n; ++i) {
      const EnvironmentField field(kLaw, 2, 600, env_base + i);
      WalkRng rng(600, env_base + i, kTagDiscreteWalk);
      const WalkOutcome out = run_discrete_walk(field, rng, t);
      const double norm = out.final_position.l2_norm(2);
      if (norm >= 2 * sqrt_t) ++at2;
      if (norm >= 4 * sqrt_t) ++at4;
      exp_sum += std::exp(lambda * norm * norm / static_cast<double>(t));
    }
    exp_moments.push_back(exp_sum / static_cast<double>(n));
    if (t <= 64) {
      CHECK(at2 > 0);
      CHECK(static_cast<double>(at4) < 0.01 * static_cast<double>(at2));
    }
  }
  for (const double m : exp_moments) {
    CHECK(std::isfinite(m));
    CHECK(m >= 1.0);
  }
  for (std::size_t i = 0; i < exp_moments.size(); ++i)
    for (std::size_t j = 0; j < exp_moments.size(); ++j)
      CHECK(exp_moments[i] / exp_moments[j] < 2.0);
}
