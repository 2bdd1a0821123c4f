#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/philox.hpp"

namespace rwre {

template <class F>
concept NeighborWeightField = requires(const F& f, const Site& x) {
  { f.dim() } -> std::convertible_to<int>;
  { f.neighbor_weights(x) } -> std::convertible_to<std::array<double, 2 * kMaxDim>>;
};

// Domain tags separating decision streams from the environment's conductance
// stream: conductance messages carry an axis index (< kMaxDim) in the same
// slot, so any large constant keeps the streams disjoint under one seed.
inline constexpr std::uint64_t kTagDiscreteWalk = 0x57414C4B00000059ull;
inline constexpr std::uint64_t kTagContinuousWalk = 0x57414C4B00000058ull;

// Per-walk decision stream: a counter-mode view of the keyed PRF under the
// stream key (seed, env_index, tag).
class WalkRng {
 public:
  WalkRng(std::uint64_t seed, std::uint64_t env_index, std::uint64_t tag)
      : prf_(seed), env_index_(env_index) {
    prefix_ = prf_.absorb(KeyedPrf::iv(), KeyedPrf::pack(env_index, tag));
  }

  double next_unit() {
    const Block out = prf_.absorb(prefix_, KeyedPrf::pack(counter_++, 0));
    return to_unit_interval(low64(out));
  }

  std::uint64_t draw_count() const { return counter_; }
  std::uint64_t env_index() const { return env_index_; }

 private:
  KeyedPrf prf_;
  std::uint64_t env_index_;
  Block prefix_{};
  std::uint64_t counter_ = 0;
};

struct WalkOutcome {
  Site final_position;
  double origin_weight = 0;  // p_omega(0) of this walk's environment
  double horizon = 0;        // steps for Y, real time for X
  std::uint64_t env_index = 0;
  std::uint64_t jumps = 0;
  std::uint64_t draws = 0;  // conductance queries + decision draws
};

template <NeighborWeightField F>
std::array<double, 2 * kMaxDim> step_distribution(const F& field, const Site& x) {
  auto w = field.neighbor_weights(x);
  const int m = 2 * field.dim();
  double total = 0;
  for (int k = 0; k < m; ++k) total += w[static_cast<std::size_t>(k)];
  for (int k = 0; k < m; ++k) w[static_cast<std::size_t>(k)] /= total;
  return w;
}

namespace detail {

// Inverse-CDF pick over unnormalized weights in the fixed direction order;
// strict comparisons resolve ties to the later index, the clamp guards FP
// rounding at the top end.
inline int pick_direction(const std::array<double, 2 * kMaxDim>& w, int m, double unit,
                          double total) {
  const double u = unit * total;
  double cum = 0;
  for (int k = 0; k < m - 1; ++k) {
    cum += w[static_cast<std::size_t>(k)];
    if (u < cum) return k;
  }
  return m - 1;
}

inline void apply_step(Site& x, int k) {
  const int axis = k >> 1;
  x[axis] += (k & 1) ? -1 : 1;
}

}  // namespace detail

template <NeighborWeightField F>
WalkOutcome run_discrete_walk(const F& field, WalkRng& rng, std::int64_t t,
                              std::vector<Site>* trace = nullptr) {
  if (t < 1) throw std::invalid_argument("discrete walk horizon must be >= 1");
  const int d = field.dim();
  const int m = 2 * d;
  WalkOutcome out;
  out.horizon = static_cast<double>(t);
  out.env_index = rng.env_index();
  Site x{};
  if (trace) {
    trace->clear();
    trace->push_back(x);
  }
  for (std::int64_t s = 0; s < t; ++s) {
    const auto w = field.neighbor_weights(x);
    double total = 0;
    for (int k = 0; k < m; ++k) total += w[static_cast<std::size_t>(k)];
    if (s == 0) out.origin_weight = total;
    detail::apply_step(x, detail::pick_direction(w, m, rng.next_unit(), total));
    if (trace) trace->push_back(x);
  }
  out.final_position = x;
  out.jumps = static_cast<std::uint64_t>(t);
  out.draws = static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(m) + rng.draw_count();
  return out;
}

template <NeighborWeightField F>
WalkOutcome run_continuous_walk(const F& field, WalkRng& rng, double t,
                                std::vector<Site>* trace = nullptr) {
  if (!(t > 0)) throw std::invalid_argument("continuous walk horizon must be positive");
  const int d = field.dim();
  const int m = 2 * d;
  WalkOutcome out;
  out.horizon = t;
  out.env_index = rng.env_index();
  Site x{};
  if (trace) {
    trace->clear();
    trace->push_back(x);
  }
  auto w = field.neighbor_weights(x);
  double rate = 0;
  for (int k = 0; k < m; ++k) rate += w[static_cast<std::size_t>(k)];
  out.origin_weight = rate;
  std::uint64_t weight_queries = static_cast<std::uint64_t>(m);
  double time = 0;
  while (true) {
    const double hold = -std::log1p(-rng.next_unit()) / rate;
    if (time + hold > t) break;
    time += hold;
    detail::apply_step(x, detail::pick_direction(w, m, rng.next_unit(), rate));
    ++out.jumps;
    if (trace) trace->push_back(x);
    w = field.neighbor_weights(x);
    rate = 0;
    for (int k = 0; k < m; ++k) rate += w[static_cast<std::size_t>(k)];
    weight_queries += static_cast<std::uint64_t>(m);
  }
  out.final_position = x;
  out.draws = weight_queries + rng.draw_count();
  return out;
}

}  // namespace rwre
