#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/walker.hpp"

namespace rwre {

inline constexpr std::int64_t kOracleMaxEntries = std::int64_t(1) << 21;
inline constexpr std::int64_t kBalanceMaxEntries = std::int64_t(1) << 24;
inline constexpr double kOracleTolerance = 0x1.0p-40;

// Exact distribution of Y(t) under the quenched law of one environment,
// stored densely over the coordinate box [-t, t]^d (the support is the L1
// ball of radius t inside it).
class ExactKernel {
 public:
  ExactKernel(int dim, std::int64_t t, std::vector<long double> prob)
      : dim_(dim), t_(t), side_(2 * t + 1), prob_(std::move(prob)) {}

  int dim() const { return dim_; }
  std::int64_t horizon() const { return t_; }
  std::int64_t radius() const { return t_; }
  std::size_t entries() const { return prob_.size(); }

  long double probability(const Site& x) const {
    std::int64_t idx = 0;
    std::int64_t stride = 1;
    for (int i = 0; i < dim_; ++i) {
      const std::int64_t c = x[i];
      if (c < -t_ || c > t_) return 0.0L;
      idx += (c + t_) * stride;
      stride *= side_;
    }
    return prob_[static_cast<std::size_t>(idx)];
  }

  long double total_mass() const {
    long double s = 0;
    for (const long double p : prob_) s += p;
    return s;
  }

  double sigma_sq(const Direction& xi) const {
    long double s = 0;
    for_each_site([&](const Site& x, long double p) {
      const long double q = static_cast<long double>(xi.dot(x));
      s += p * q * q;
    });
    return static_cast<double>(s / static_cast<long double>(t_));
  }

  // P[|Y(t)| >= radius] in the Euclidean norm.
  double radial_tail(double radius) const {
    long double s = 0;
    for_each_site([&](const Site& x, long double p) {
      if (x.l2_norm(dim_) >= radius) s += p;
    });
    return static_cast<double>(s);
  }

  template <class Fn>
  void for_each_site(Fn&& fn) const {
    Site x{};
    for (int i = 0; i < dim_; ++i) x[i] = -t_;
    for (std::size_t idx = 0; idx < prob_.size(); ++idx) {
      fn(static_cast<const Site&>(x), prob_[idx]);
      for (int i = 0; i < dim_; ++i) {
        if (++x[i] <= t_) break;
        x[i] = -t_;
      }
    }
  }

  void write_csv(std::ostream& os) const {
    os << "probability";
    for (int i = 0; i < dim_; ++i) os << ",x" << (i + 1);
    os << '\n';
    for_each_site([&](const Site& x, long double p) {
      if (p <= 0) return;
      char num[48];
      std::snprintf(num, sizeof num, "%.21Lg", p);
      os << num;
      for (int i = 0; i < dim_; ++i) os << ',' << x[i];
      os << '\n';
    });
  }

 private:
  int dim_;
  std::int64_t t_;
  std::int64_t side_;
  std::vector<long double> prob_;
};

namespace detail {

inline std::int64_t checked_box_entries(int dim, std::int64_t half_side, std::int64_t limit) {
  const std::int64_t side = 2 * half_side + 1;
  std::int64_t entries = 1;
  for (int i = 0; i < dim; ++i) {
    if (entries > limit / side) return -1;
    entries *= side;
  }
  return entries;
}

}  // namespace detail

// Dense pushforward of the quenched jump chain for t steps. Guarded by the
// dense box size (2t+1)^d; rejection signals oracle misuse at scale.
template <NeighborWeightField F>
ExactKernel exact_distribution(const F& field, std::int64_t t) {
  const int d = field.dim();
  if (t < 1) throw std::invalid_argument("exact kernel horizon must be >= 1");
  if (d > 3) throw std::invalid_argument("exact kernel supports d <= 3");
  const std::int64_t entries = detail::checked_box_entries(d, t, kOracleMaxEntries);
  if (entries < 0)
    throw std::invalid_argument("exact kernel box exceeds the dense entry budget");
  const std::int64_t side = 2 * t + 1;
  const int m = 2 * d;

  std::array<std::int64_t, kMaxDim> stride{};
  std::int64_t acc = 1;
  for (int i = 0; i < d; ++i) {
    stride[static_cast<std::size_t>(i)] = acc;
    acc *= side;
  }

  // Normalized jump rows for every site of the box, in the walker's fixed
  // direction order; computed once since the environment is static.
  std::vector<double> row(static_cast<std::size_t>(entries) * static_cast<std::size_t>(m));
  {
    Site x{};
    for (int i = 0; i < d; ++i) x[i] = -t;
    for (std::int64_t idx = 0; idx < entries; ++idx) {
      const auto w = field.neighbor_weights(x);
      double total = 0;
      for (int k = 0; k < m; ++k) total += w[static_cast<std::size_t>(k)];
      for (int k = 0; k < m; ++k)
        row[static_cast<std::size_t>(idx * m + k)] = w[static_cast<std::size_t>(k)] / total;
      for (int i = 0; i < d; ++i) {
        if (++x[i] <= t) break;
        x[i] = -t;
      }
    }
  }

  std::vector<long double> old_mass(static_cast<std::size_t>(entries), 0.0L);
  std::vector<long double> new_mass(static_cast<std::size_t>(entries), 0.0L);
  std::int64_t origin = 0;
  for (int i = 0; i < d; ++i) origin += t * stride[static_cast<std::size_t>(i)];
  old_mass[static_cast<std::size_t>(origin)] = 1.0L;

  std::vector<std::int64_t> coord(static_cast<std::size_t>(d));
  for (std::int64_t step = 0; step < t; ++step) {
    for (int i = 0; i < d; ++i) coord[static_cast<std::size_t>(i)] = -t;
    for (std::int64_t idx = 0; idx < entries; ++idx) {
      // Gather incoming mass in fixed direction order: the neighbour on the
      // k side sends mass through its own k-th jump probability.
      long double s = 0;
      for (int k = 0; k < m; ++k) {
        const int axis = k >> 1;
        const std::int64_t delta = (k & 1) ? 1 : -1;  // source = target - step_k
        const std::int64_t c = coord[static_cast<std::size_t>(axis)] + delta;
        if (c < -t || c > t) continue;
        const std::int64_t src = idx + delta * stride[static_cast<std::size_t>(axis)];
        s += old_mass[static_cast<std::size_t>(src)] *
             static_cast<long double>(row[static_cast<std::size_t>(src * m + k)]);
      }
      new_mass[static_cast<std::size_t>(idx)] = s;
      for (int i = 0; i < d; ++i) {
        if (++coord[static_cast<std::size_t>(i)] <= t) break;
        coord[static_cast<std::size_t>(i)] = -t;
      }
    }
    old_mass.swap(new_mass);
  }
  return ExactKernel(d, t, std::move(old_mass));
}

template <NeighborWeightField F>
double exact_sigma_t(const F& field, const Direction& xi, std::int64_t t) {
  return exact_distribution(field, t).sigma_sq(xi);
}

struct BalanceReport {
  bool balanced = false;
  double max_violation = 0;
};

// Checks p(x) P(x -> y) = p(y) P(y -> x) over every edge with both endpoints
// in the L1 ball of radius R, recomputing the normalized chain from neighbour
// weights so asymmetric field stubs are caught.
template <NeighborWeightField F>
BalanceReport check_detailed_balance(const F& field, std::int64_t radius) {
  if (radius < 0 || radius > 64) throw std::invalid_argument("balance check radius must lie in [0, 64]");
  const int d = field.dim();
  const std::int64_t entries = detail::checked_box_entries(d, radius, kBalanceMaxEntries);
  if (entries < 0) throw std::invalid_argument("balance check box exceeds the entry budget");
  const int m = 2 * d;

  BalanceReport rep;
  Site x{};
  for (int i = 0; i < d; ++i) x[i] = -radius;
  for (std::int64_t idx = 0; idx < entries; ++idx) {
    if (x.l1_norm(d) <= radius) {
      const auto wx = field.neighbor_weights(x);
      double px = 0;
      for (int k = 0; k < m; ++k) px += wx[static_cast<std::size_t>(k)];
      for (int axis = 0; axis < d; ++axis) {
        Site y = x;
        y[axis] += 1;
        if (y.l1_norm(d) > radius) continue;
        const auto wy = field.neighbor_weights(y);
        double py = 0;
        for (int k = 0; k < m; ++k) py += wy[static_cast<std::size_t>(k)];
        const double flux_xy = px * (wx[static_cast<std::size_t>(2 * axis)] / px);
        const double flux_yx = py * (wy[static_cast<std::size_t>(2 * axis + 1)] / py);
        const double viol = std::fabs(flux_xy - flux_yx);
        if (viol > rep.max_violation) rep.max_violation = viol;
      }
    }
    for (int i = 0; i < d; ++i) {
      if (++x[i] <= radius) break;
      x[i] = -radius;
    }
  }
  rep.balanced = rep.max_violation <= kOracleTolerance;
  return rep;
}

}  // namespace rwre
