#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace rwre {

inline constexpr int kMaxDim = 8;

// A site of Z^d. Storage is fixed-width; the active dimension is carried by
// whoever owns the site (field, walker, kernel).
struct Site {
  std::array<std::int64_t, kMaxDim> c{};

  std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Site& a, const Site& b) { return a.c == b.c; }

  std::int64_t l1_norm(int dim) const {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s += std::llabs(c[static_cast<std::size_t>(i)]);
    return s;
  }

  double l2_norm(int dim) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) {
      const double v = static_cast<double>(c[static_cast<std::size_t>(i)]);
      s += v * v;
    }
    return std::sqrt(s);
  }

  std::int64_t coord_sum(int dim) const {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s += c[static_cast<std::size_t>(i)];
    return s;
  }
};

// Canonical undirected edge {x, x + e_axis}, keyed by its lower endpoint.
struct Edge {
  Site base;
  int axis = 0;
};

// Unit vector xi in R^d.
struct Direction {
  std::array<double, kMaxDim> v{};
  int dim = 0;

  static Direction axis(int i, int d) {
    if (d < 1 || d > kMaxDim || i < 0 || i >= d)
      throw std::invalid_argument("direction axis out of range");
    Direction xi;
    xi.dim = d;
    xi.v[static_cast<std::size_t>(i)] = 1.0;
    return xi;
  }

  static Direction from_components(const std::vector<double>& comps) {
    const int d = static_cast<int>(comps.size());
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("direction dimension out of range");
    double norm2 = 0;
    for (double x : comps) norm2 += x * x;
    if (!(norm2 > 0) || !std::isfinite(norm2))
      throw std::invalid_argument("direction must be a nonzero finite vector");
    const double inv = 1.0 / std::sqrt(norm2);
    Direction xi;
    xi.dim = d;
    for (int i = 0; i < d; ++i) xi.v[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)] * inv;
    return xi;
  }

  double dot(const Site& x) const {
    double s = 0;
    for (int i = 0; i < dim; ++i)
      s += v[static_cast<std::size_t>(i)] * static_cast<double>(x[i]);
    return s;
  }

  double norm() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    return std::sqrt(s);
  }
};

}  // namespace rwre
