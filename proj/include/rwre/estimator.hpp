#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/conductance_law.hpp"
#include "rwre/env_field.hpp"
#include "rwre/lattice.hpp"
#include "rwre/walker.hpp"

namespace rwre {

inline constexpr double kZ95 = 1.959963984540054;

// Neumaier-compensated accumulator; merging adds the partial sum and its
// compensation, so shard merges in a fixed order are bit-stable.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

// Mergeable sufficient statistics for the weighted estimator
// A_n(t) = sum_i p_i (xi.Y_i)^2 / (t sum_i p_i) plus the cross moments the
// delta-method CI needs and the plain (xi.Y)^2 moments for diagnostics.
class EstimatorState {
 public:
  explicit EstimatorState(double horizon) : horizon_(horizon) {
    if (!(horizon > 0)) throw std::invalid_argument("estimator horizon must be positive");
  }

  void accumulate(const WalkOutcome& outcome, const Direction& xi) {
    if (outcome.horizon != horizon_)
      throw std::invalid_argument("walk horizon does not match estimator state");
    const double q = xi.dot(outcome.final_position);
    const double q2 = q * q;
    const double p = outcome.origin_weight;
    const double u = p * q2;
    ++n_;
    draws_ += outcome.draws;
    sum_u_.add(u);
    sum_w_.add(p);
    sum_u2_.add(u * u);
    sum_w2_.add(p * p);
    sum_uw_.add(u * p);
    sum_q2_.add(q2);
    sum_q4_.add(q2 * q2);
  }

  void merge(const EstimatorState& other) {
    if (other.horizon_ != horizon_)
      throw std::invalid_argument("cannot merge estimator states with different horizons");
    n_ += other.n_;
    draws_ += other.draws_;
    sum_u_.merge(other.sum_u_);
    sum_w_.merge(other.sum_w_);
    sum_u2_.merge(other.sum_u2_);
    sum_w2_.merge(other.sum_w2_);
    sum_uw_.merge(other.sum_uw_);
    sum_q2_.merge(other.sum_q2_);
    sum_q4_.merge(other.sum_q4_);
  }

  std::uint64_t n() const { return n_; }
  double horizon() const { return horizon_; }
  std::uint64_t draws() const { return draws_; }
  double sum_weighted_sq() const { return sum_u_.value(); }
  double sum_weights() const { return sum_w_.value(); }
  double sum_weighted_sq_sq() const { return sum_u2_.value(); }
  double sum_weights_sq() const { return sum_w2_.value(); }
  double sum_cross() const { return sum_uw_.value(); }
  double sum_q2() const { return sum_q2_.value(); }
  double sum_q4() const { return sum_q4_.value(); }

 private:
  double horizon_;
  std::uint64_t n_ = 0;
  std::uint64_t draws_ = 0;
  CompensatedSum sum_u_, sum_w_, sum_u2_, sum_w2_, sum_uw_, sum_q2_, sum_q4_;
};

struct EstimateReport {
  double t = 0;
  std::uint64_t n = 0;
  double a_hat = 0;             // estimate of sigma_t^2
  double p_hat = 0;             // normalizer, -> 1
  double sigma2_direction = 0;  // alias of a_hat
  double ahom_direction = 0;    // (E[p]/2) a_hat
  double ci_halfwidth = 0;      // 95% half-width for a_hat

  static std::string csv_header() { return "t,n,a_hat,p_hat,ahom_direction,ci_halfwidth,seed"; }

  std::string csv_row(std::uint64_t seed) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%llu,%.17g,%.17g,%.17g,%.17g,%llu", t,
                  static_cast<unsigned long long>(n), a_hat, p_hat, ahom_direction, ci_halfwidth,
                  static_cast<unsigned long long>(seed));
    return buf;
  }

  std::string json_object(std::uint64_t seed) const {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "{\"t\":%.17g,\"n\":%llu,\"a_hat\":%.17g,\"p_hat\":%.17g,"
                  "\"ahom_direction\":%.17g,\"ci_halfwidth\":%.17g,\"seed\":%llu}",
                  t, static_cast<unsigned long long>(n), a_hat, p_hat, ahom_direction,
                  ci_halfwidth, static_cast<unsigned long long>(seed));
    return buf;
  }
};

// Delta-method variance of the ratio of means u/w, for A = mean(u)/(t mean(w)).
inline double ratio_ci_halfwidth(const EstimatorState& s) {
  const double n = static_cast<double>(s.n());
  const double ub = s.sum_weighted_sq() / n;
  const double wb = s.sum_weights() / n;
  const double vu = s.sum_weighted_sq_sq() / n - ub * ub;
  const double vw = s.sum_weights_sq() / n - wb * wb;
  const double cuw = s.sum_cross() / n - ub * wb;
  const double r = ub / wb;
  const double tw = s.horizon() * wb;
  double var = (vu - 2.0 * r * cuw + r * r * vw) / (n * tw * tw);
  if (!(var > 0)) var = 0;
  return kZ95 * std::sqrt(var);
}

inline EstimateReport report(const EstimatorState& state, const ConductanceLaw& law, int d) {
  if (state.n() < 2) throw std::invalid_argument("report requires at least two walks");
  const double ep = mean_site_weight(law, d);
  EstimateReport r;
  r.t = state.horizon();
  r.n = state.n();
  r.a_hat = state.sum_weighted_sq() / (state.horizon() * state.sum_weights());
  r.p_hat = state.sum_weights() / (static_cast<double>(state.n()) * ep);
  r.sigma2_direction = r.a_hat;
  r.ahom_direction = 0.5 * ep * r.a_hat;
  r.ci_halfwidth = ratio_ci_halfwidth(state);
  return r;
}

struct FluctuationSummary {
  std::vector<double> deviations;  // t (A_j - pooled mean)
  double mean = 0;
  double variance = 0;
  double sd = 0;
  double skewness = 0;
  double excess_kurtosis = 0;
};

// Rescaled deviations across m repetitions with identical (n, t); centered at
// the pooled mean since sigma_t^2 has no closed form.
inline FluctuationSummary fluctuation_sample(const std::vector<EstimateReport>& reports) {
  if (reports.size() < 2) throw std::invalid_argument("fluctuation sample requires m >= 2");
  const double t = reports.front().t;
  const std::uint64_t n = reports.front().n;
  for (const auto& r : reports)
    if (r.t != t || r.n != n)
      throw std::invalid_argument("fluctuation repetitions must share (n, t)");
  const double m = static_cast<double>(reports.size());
  CompensatedSum pooled;
  for (const auto& r : reports) pooled.add(r.a_hat);
  const double center = pooled.value() / m;

  FluctuationSummary out;
  out.deviations.reserve(reports.size());
  CompensatedSum s1, s2, s3, s4;
  for (const auto& r : reports) {
    const double dev = t * (r.a_hat - center);
    out.deviations.push_back(dev);
    s1.add(dev);
  }
  out.mean = s1.value() / m;
  for (const double dev : out.deviations) {
    const double c = dev - out.mean;
    s2.add(c * c);
    s3.add(c * c * c);
    s4.add(c * c * c * c);
  }
  out.variance = s2.value() / m;
  out.sd = std::sqrt(out.variance);
  if (out.variance > 0) {
    out.skewness = s3.value() / m / std::pow(out.variance, 1.5);
    out.excess_kurtosis = s4.value() / m / (out.variance * out.variance) - 3.0;
  }
  return out;
}

}  // namespace rwre
