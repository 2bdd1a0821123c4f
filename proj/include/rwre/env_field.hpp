#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "rwre/conductance_law.hpp"
#include "rwre/lattice.hpp"
#include "rwre/philox.hpp"

namespace rwre {

// Lazily generated random environment: conductance(e) is a pure function of
// (seed, env_index, canonical edge key), so any number of concurrent readers
// querying in any order observe the same environment without storing it.
//
// Edge key serialization (fixed-width little-endian words fed to the chained
// PRF): env_index:u64, axis:u64, coords:i64 x d, zero-padded to whole 128-bit
// blocks. The (env_index, axis) prefix block repeats across all edges of one
// axis, so its chained state is cached per axis at construction.
class EnvironmentField {
 public:
  EnvironmentField(ConductanceLaw law, int dim, std::uint64_t seed, std::uint64_t env_index)
      : law_(std::move(law)), dim_(dim), seed_(seed), env_index_(env_index), prf_(seed) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must lie in [1, 8]");
    for (int axis = 0; axis < dim_; ++axis)
      axis_prefix_[static_cast<std::size_t>(axis)] =
          prf_.absorb(KeyedPrf::iv(), KeyedPrf::pack(env_index_, static_cast<std::uint64_t>(axis)));
  }

  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t env_index() const { return env_index_; }
  const ConductanceLaw& law() const { return law_; }

  double conductance(const Edge& e) const {
    if (e.axis < 0 || e.axis >= dim_) throw std::invalid_argument("edge axis out of range");
    Block state = axis_prefix_[static_cast<std::size_t>(e.axis)];
    for (int i = 0; i < dim_; i += 2) {
      const std::uint64_t a = std::bit_cast<std::uint64_t>(e.base[i]);
      const std::uint64_t b = i + 1 < dim_ ? std::bit_cast<std::uint64_t>(e.base[i + 1]) : 0;
      state = prf_.absorb(state, KeyedPrf::pack(a, b));
    }
    return law_.sample(low64(state), e.axis);
  }

  // Weights of the 2d incident edges of x in the walker's fixed direction
  // order (+e1, -e1, ..., +ed, -ed).
  std::array<double, 2 * kMaxDim> neighbor_weights(const Site& x) const {
    std::array<double, 2 * kMaxDim> w{};
    for (int axis = 0; axis < dim_; ++axis) {
      w[static_cast<std::size_t>(2 * axis)] = conductance(Edge{x, axis});
      Site below = x;
      below[axis] -= 1;
      w[static_cast<std::size_t>(2 * axis + 1)] = conductance(Edge{below, axis});
    }
    return w;
  }

  double site_weight(const Site& x) const {
    const auto w = neighbor_weights(x);
    double s = 0;
    for (int k = 0; k < 2 * dim_; ++k) s += w[static_cast<std::size_t>(k)];
    return s;
  }

 private:
  ConductanceLaw law_;
  int dim_;
  std::uint64_t seed_;
  std::uint64_t env_index_;
  KeyedPrf prf_;
  std::array<Block, kMaxDim> axis_prefix_{};
};

// Exact E[p] = sum over axes of 2 E[omega_axis].
inline double mean_site_weight(const ConductanceLaw& law, int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must lie in [1, 8]");
  double s = 0;
  for (int axis = 0; axis < dim; ++axis) s += 2.0 * law.mean_edge(axis);
  return s;
}

inline double var_site_weight(const ConductanceLaw& law, int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must lie in [1, 8]");
  double s = 0;
  for (int axis = 0; axis < dim; ++axis) s += 2.0 * law.var_edge(axis);
  return s;
}

}  // namespace rwre
