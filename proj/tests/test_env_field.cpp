#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rwre/env_field.hpp"

using namespace rwre;

namespace {

Edge make_edge(std::int64_t x, std::int64_t y, int axis) {
  Edge e;
  e.base = Site{};
  e.base[0] = x;
  e.base[1] = y;
  e.axis = axis;
  return e;
}

}  // namespace

TEST_CASE("queries are pure: replay in any order, or from a fresh field") {
  const ConductanceLaw law = ConductanceLaw::two_point(1.0, 4.0, 0.5);
  const EnvironmentField field(law, 2, 0xabcdef0123456789ull, 17);

  std::vector<Edge> edges;
  for (std::int64_t x = -20; x <= 20; x += 3)
    for (std::int64_t y = -20; y <= 20; y += 7)
      for (int axis = 0; axis < 2; ++axis) edges.push_back(make_edge(x, y, axis));

  std::vector<double> forward;
  for (const Edge& e : edges) forward.push_back(field.conductance(e));

  std::vector<double> reversed;
  for (auto it = edges.rbegin(); it != edges.rend(); ++it) reversed.push_back(field.conductance(*it));
  std::reverse(reversed.begin(), reversed.end());
  CHECK(forward == reversed);

  const EnvironmentField replay(law, 2, 0xabcdef0123456789ull, 17);
  for (std::size_t i = 0; i < edges.size(); ++i) CHECK(replay.conductance(edges[i]) == forward[i]);
}

TEST_CASE("values honor the law's support bounds") {
  const EnvironmentField two(ConductanceLaw::two_point(1.0, 4.0, 0.5), 2, 5, 0);
  const EnvironmentField uni(ConductanceLaw::uniform(2.0, 3.0), 3, 5, 0);
  for (std::int64_t x = -50; x < 50; ++x) {
    const double v = two.conductance(make_edge(x, -x, x & 1));
    CHECK((v == 1.0 || v == 4.0));
    Edge e = make_edge(x, 2 * x, static_cast<int>((x % 3 + 3) % 3));
    const double u = uni.conductance(e);
    CHECK(u >= 2.0);
    CHECK(u < 3.0);
  }
}

TEST_CASE("edge-value mean and symbol frequency over a million edges") {
  const ConductanceLaw law = ConductanceLaw::two_point(1.0, 4.0, 0.5);
  const EnvironmentField field(law, 2, 2024, 3);
  const std::int64_t side = 708;  // 708^2 * 2 > 1e6 edges
  double sum = 0;
  std::uint64_t n = 0, alphas = 0;
  for (std::int64_t x = 0; x < side; ++x) {
    for (std::int64_t y = 0; y < side; ++y) {
      for (int axis = 0; axis < 2; ++axis) {
        const double v = field.conductance(make_edge(x, y, axis));
        sum += v;
        alphas += v == 1.0 ? 1 : 0;
        ++n;
      }
    }
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double mean_se = std::sqrt(law.var_edge(0) / nn);
  CHECK(std::fabs(mean - law.mean_edge(0)) < 5 * mean_se);

  const double freq = static_cast<double>(alphas) / nn;
  const double freq_se = std::sqrt(0.25 / nn);
  CHECK(std::fabs(freq - 0.5) < 5 * freq_se);
}

TEST_CASE("distinct environment indices decorrelate shared edge keys") {
  const ConductanceLaw law = ConductanceLaw::two_point(1.0, 4.0, 0.5);
  const EnvironmentField a(law, 2, 99, 0);
  const EnvironmentField b(law, 2, 99, 1);
  std::uint64_t n = 0, agree = 0;
  for (std::int64_t x = 0; x < 250; ++x) {
    for (std::int64_t y = 0; y < 200; ++y) {
      for (int axis = 0; axis < 2; ++axis) {
        const Edge e = make_edge(x, y, axis);
        agree += a.conductance(e) == b.conductance(e) ? 1 : 0;
        ++n;
      }
    }
  }
  // Independent symmetric two-point values agree with probability 1/2.
  const double nn = static_cast<double>(n);
  const double freq = static_cast<double>(agree) / nn;
  CHECK(std::fabs(freq - 0.5) < 5 * std::sqrt(0.25 / nn));
}

TEST_CASE("site weight sums the incident edges; analytic means") {
  const EnvironmentField field(ConductanceLaw::two_point(1.0, 4.0, 0.5), 2, 7, 0);
  Site x;
  x[0] = 3;
  x[1] = -2;
  const auto w = field.neighbor_weights(x);
  CHECK(field.site_weight(x) == w[0] + w[1] + w[2] + w[3]);
  // Incident edges (1,1,4,4) sum to 10; here check bounds instead of values.
  CHECK(field.site_weight(x) >= 4.0);
  CHECK(field.site_weight(x) <= 16.0);

  CHECK(mean_site_weight(ConductanceLaw::two_point(1.0, 4.0, 0.5), 2) == 10.0);
  CHECK(mean_site_weight(ConductanceLaw::constant(3.0), 2) == 12.0);
  CHECK(mean_site_weight(ConductanceLaw::uniform(1.0, 3.0), 3) == 12.0);
  CHECK(var_site_weight(ConductanceLaw::constant(3.0), 2) == 0.0);
  CHECK(var_site_weight(ConductanceLaw::two_point(1.0, 4.0, 0.5), 2) == doctest::Approx(9.0));
}

TEST_CASE("hand-built incident weights match conductance() edge by edge") {
  const EnvironmentField field(ConductanceLaw::two_point(1.0, 4.0, 0.5), 2, 11, 4);
  Site x;
  x[0] = 5;
  x[1] = 9;
  const auto w = field.neighbor_weights(x);
  CHECK(w[0] == field.conductance(Edge{x, 0}));
  Site left = x;
  left[0] -= 1;
  CHECK(w[1] == field.conductance(Edge{left, 0}));
  CHECK(w[2] == field.conductance(Edge{x, 1}));
  Site down = x;
  down[1] -= 1;
  CHECK(w[3] == field.conductance(Edge{down, 1}));
}

TEST_CASE("law parsing accepts the documented forms and rejects bad parameters") {
  const ConductanceLaw tp = ConductanceLaw::parse("two_point:1,4,0.5");
  CHECK(tp.kind() == LawKind::two_point);
  CHECK(tp.axis_params(0).beta == 4.0);
  const ConductanceLaw un = ConductanceLaw::parse("uniform:1,3");
  CHECK(un.kind() == LawKind::uniform);
  const ConductanceLaw ct = ConductanceLaw::parse("constant:2");
  CHECK(ct.is_constant());
  CHECK(ct.constant_value() == 2.0);

  CHECK_THROWS_AS(ConductanceLaw::parse("two_point:4,1,0.5"), LawError);  // beta < alpha
  CHECK_THROWS_AS(ConductanceLaw::parse("two_point:0,1,0.5"), LawError);  // alpha <= 0
  CHECK_THROWS_AS(ConductanceLaw::parse("two_point:1,4,1.5"), LawError);  // prob outside [0,1]
  CHECK_THROWS_AS(ConductanceLaw::parse("uniform:3"), LawError);
  CHECK_THROWS_AS(ConductanceLaw::parse("bogus:1,2"), LawError);
  CHECK_THROWS_AS(ConductanceLaw::parse(""), LawError);
}

TEST_CASE("scaling a two-point law scales every edge value exactly") {
  const EnvironmentField base(ConductanceLaw::two_point(1.0, 4.0, 0.5), 2, 31, 6);
  const EnvironmentField scaled(ConductanceLaw::two_point(2.0, 8.0, 0.5), 2, 31, 6);
  for (std::int64_t x = -40; x < 40; x += 3)
    for (int axis = 0; axis < 2; ++axis) {
      const Edge e = make_edge(x, x * x % 17, axis);
      CHECK(scaled.conductance(e) == 2.0 * base.conductance(e));
    }
}

TEST_CASE("per-axis parameters override the base marginal") {
  ConductanceLaw law = ConductanceLaw::two_point(1.0, 4.0, 0.5);
  law.set_axis_params(1, AxisParams{10.0, 10.0, 1.0});
  CHECK(law.has_axis_overrides());
  CHECK(law.mean_edge(0) == 2.5);
  CHECK(law.mean_edge(1) == 10.0);
  const EnvironmentField field(law, 2, 13, 2);
  const EnvironmentField plain(ConductanceLaw::two_point(1.0, 4.0, 0.5), 2, 13, 2);
  for (std::int64_t x = 0; x < 30; ++x) {
    CHECK(field.conductance(make_edge(x, -x, 1)) == 10.0);
    // Axis-0 edges keep the base law and the exact same values as the plain field.
    CHECK(field.conductance(make_edge(x, -x, 0)) == plain.conductance(make_edge(x, -x, 0)));
  }
  CHECK_THROWS_AS(law.set_axis_params(9, AxisParams{1.0, 1.0, 1.0}), LawError);
  CHECK_THROWS_AS(law.set_axis_params(0, AxisParams{-1.0, 1.0, 0.5}), LawError);
}

TEST_CASE("dimension is validated") {
  CHECK_THROWS_AS(EnvironmentField(ConductanceLaw::constant(1.0), 0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(EnvironmentField(ConductanceLaw::constant(1.0), 9, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(mean_site_weight(ConductanceLaw::constant(1.0), 0), std::invalid_argument);
}
