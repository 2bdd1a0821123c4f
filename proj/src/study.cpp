#include "rwre/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "rwre/env_field.hpp"
#include "rwre/walker.hpp"

namespace rwre {

namespace {

constexpr std::uint64_t kBlockSize = 8192;
constexpr std::uint64_t kU64Max = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kU64Max / b) return kU64Max;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kU64Max - b ? kU64Max : a + b;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Fixed-size index blocks claimed by workers; per-block states are returned
// in block order, so downstream merges are bit-identical for any worker count.
template <class State, class MakeState, class PerIndex>
std::vector<State> run_blocks(std::uint64_t n, unsigned workers, MakeState make_state,
                              PerIndex per_index) {
  const std::uint64_t nblocks = n == 0 ? 0 : (n - 1) / kBlockSize + 1;
  std::vector<State> states;
  states.reserve(nblocks);
  for (std::uint64_t b = 0; b < nblocks; ++b) states.push_back(make_state());
  auto work_block = [&](std::uint64_t b) {
    const std::uint64_t lo = b * kBlockSize;
    const std::uint64_t hi = std::min(n, lo + kBlockSize);
    State& st = states[static_cast<std::size_t>(b)];
    for (std::uint64_t i = lo; i < hi; ++i) per_index(i, st);
  };
  const std::uint64_t usable = std::min<std::uint64_t>(workers, nblocks);
  if (usable <= 1) {
    for (std::uint64_t b = 0; b < nblocks; ++b) work_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    auto body = [&] {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        work_block(b);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(usable));
    for (std::uint64_t i = 0; i < usable; ++i) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  return states;
}

template <class Fn>
void parallel_for(std::uint64_t count, unsigned workers, Fn fn) {
  const std::uint64_t usable = std::min<std::uint64_t>(std::max(1u, workers), count);
  if (usable <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(usable));
  for (std::uint64_t i = 0; i < usable; ++i) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

EstimatorState run_discrete_population(const ConductanceLaw& law, int dim, const Direction& xi,
                                       std::int64_t t, std::uint64_t n, std::uint64_t seed,
                                       std::uint64_t env_base, unsigned workers) {
  auto states = run_blocks<EstimatorState>(
      n, workers, [&] { return EstimatorState(static_cast<double>(t)); },
      [&](std::uint64_t i, EstimatorState& st) {
        const std::uint64_t env = env_base + i;
        const EnvironmentField field(law, dim, seed, env);
        WalkRng rng(seed, env, kTagDiscreteWalk);
        st.accumulate(run_discrete_walk(field, rng, t), xi);
      });
  EstimatorState total(static_cast<double>(t));
  for (const auto& s : states) total.merge(s);
  return total;
}

std::uint64_t discrete_projection(std::uint64_t n, std::int64_t t, int dim) {
  return sat_mul(n, sat_mul(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(2 * dim + 1)));
}

void check_budget(std::uint64_t projected, const RunOptions& opts) {
  if (projected > opts.budget_draws) throw BudgetError(projected, opts.budget_draws);
}

}  // namespace

BudgetError::BudgetError(std::uint64_t projected_, std::uint64_t budget_)
    : std::runtime_error("projected draw count " + std::to_string(projected_) +
                         " exceeds budget " + std::to_string(budget_)),
      projected(projected_),
      budget(budget_) {}

void StudyPlan::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must lie in [1, 8]");
  if (xi.dim != dim) throw std::invalid_argument("xi dimension does not match d");
  if (horizons.empty()) throw std::invalid_argument("plan needs at least one horizon");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 1) throw std::invalid_argument("horizons must be >= 1");
    if (i > 0 && horizons[i] <= horizons[i - 1])
      throw std::invalid_argument("horizons must be strictly increasing");
  }
  if (replication.size() != horizons.size())
    throw std::invalid_argument("replication schedule must match horizons");
  for (const std::uint64_t k : replication)
    if (k < 1) throw std::invalid_argument("replication K(t) must be >= 1");
  if (!(scale > 0)) throw std::invalid_argument("scale must be positive");
  if (explicit_n > 0 && horizons.size() != 1)
    throw std::invalid_argument("explicit n requires a single-horizon plan");
  if (mode == StudyMode::fluctuations) {
    if (horizons.size() != 1)
      throw std::invalid_argument("fluctuations mode takes exactly one horizon");
    if (repetitions < 100) throw std::invalid_argument("fluctuations mode requires m >= 100");
  }
  if (mode == StudyMode::diagnostics && !(lambda > 0))
    throw std::invalid_argument("diagnostics lambda must be positive");
}

std::uint64_t StudyPlan::n_for(std::size_t i) const {
  if (explicit_n > 0) return explicit_n;
  const double k_scaled = static_cast<double>(replication.at(i)) * scale;
  const auto k = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(k_scaled)));
  const auto t = static_cast<std::uint64_t>(horizons.at(i));
  return sat_mul(k, sat_mul(t, t));
}

std::vector<std::int64_t> StudyPlan::table1_horizons() { return {10, 20, 40, 80, 160, 320, 640}; }

std::vector<std::uint64_t> StudyPlan::table1_replication() {
  return {100000, 3000, 3000, 1000, 500, 100, 20};
}

std::optional<double> reference_ahom(const ConductanceLaw& law, int dim) {
  if (law.is_constant()) return law.constant_value();
  if (dim == 2 && law.kind() == LawKind::two_point && !law.has_axis_overrides() &&
      law.axis_params(0).prob_alpha == 0.5) {
    const auto& p = law.axis_params(0);
    return std::sqrt(p.alpha * p.beta);
  }
  return std::nullopt;
}

std::vector<StudyRecord> run_sweep(const StudyPlan& plan, const RunOptions& opts) {
  plan.validate();
  if (plan.mode != StudyMode::sweep) throw std::invalid_argument("plan mode is not sweep");

  std::uint64_t projected = 0;
  for (std::size_t i = 0; i < plan.horizons.size(); ++i)
    projected = sat_add(projected, discrete_projection(plan.n_for(i), plan.horizons[i], plan.dim));
  check_budget(projected, opts);

  const auto reference = reference_ahom(plan.law, plan.dim);
  const double ep = mean_site_weight(plan.law, plan.dim);
  std::vector<StudyRecord> records;
  records.reserve(plan.horizons.size());
  for (std::size_t i = 0; i < plan.horizons.size(); ++i) {
    const std::int64_t t = plan.horizons[i];
    const std::uint64_t n = plan.n_for(i);
    const auto start = std::chrono::steady_clock::now();
    const EstimatorState state = run_discrete_population(
        plan.law, plan.dim, plan.xi, t, n, plan.seed, static_cast<std::uint64_t>(i) * kSweepRowStride,
        opts.workers);
    const EstimateReport rep = report(state, plan.law, plan.dim);
    StudyRecord rec;
    rec.t = t;
    rec.n = n;
    rec.a_hat = rep.a_hat;
    rec.ahom_direction = rep.ahom_direction;
    if (reference) {
      rec.has_reference = true;
      rec.systematic_error = std::fabs(*reference - rep.ahom_direction);
    }
    rec.ci_halfwidth = 0.5 * ep * rep.ci_halfwidth;
    rec.wall_seconds = elapsed_seconds(start);
    rec.draws = state.draws();
    records.push_back(rec);
  }
  return records;
}

RateFit fit_rate(const std::vector<StudyRecord>& records) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    if (!r.has_reference || !(r.systematic_error > 0)) continue;
    xs.push_back(std::log(static_cast<double>(r.t)));
    ys.push_back(std::log(r.systematic_error));
  }
  if (xs.size() < 3)
    throw std::invalid_argument("rate fit requires at least 3 records with positive error");
  const double k = static_cast<double>(xs.size());
  double xbar = 0, ybar = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= k;
  ybar /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  RateFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += resid * resid;
  }
  fit.residual_se = std::sqrt(ssr / (k - 2.0));
  return fit;
}

FluctuationStudy run_fluctuations(const StudyPlan& plan, const RunOptions& opts) {
  plan.validate();
  if (plan.mode != StudyMode::fluctuations) throw std::invalid_argument("plan mode is not fluctuations");
  const std::int64_t t = plan.horizons[0];
  const std::uint64_t n = plan.n_for(0);
  if (n < 2) throw std::invalid_argument("fluctuations need n >= 2 walks per repetition");
  if (n >= kRepetitionStride) throw std::invalid_argument("fluctuation n exceeds the repetition stride");
  const std::uint64_t m = plan.repetitions;
  check_budget(sat_mul(m, discrete_projection(n, t, plan.dim)), opts);

  std::vector<EstimateReport> reports(m);
  std::vector<std::uint64_t> rep_draws(m, 0);
  parallel_for(m, opts.workers, [&](std::uint64_t j) {
    EstimatorState st(static_cast<double>(t));
    const std::uint64_t base = j * kRepetitionStride;
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t env = base + i;
      const EnvironmentField field(plan.law, plan.dim, plan.seed, env);
      WalkRng rng(plan.seed, env, kTagDiscreteWalk);
      st.accumulate(run_discrete_walk(field, rng, t), plan.xi);
    }
    reports[static_cast<std::size_t>(j)] = report(st, plan.law, plan.dim);
    rep_draws[static_cast<std::size_t>(j)] = st.draws();
  });

  FluctuationStudy out;
  out.t = t;
  out.n = n;
  out.m = m;
  out.summary = fluctuation_sample(reports);
  for (const std::uint64_t dr : rep_draws) out.draws += dr;

  constexpr int kBins = 61;
  const double half = out.summary.sd > 0 ? 6.0 * out.summary.sd : 1.0;
  const double lo = -half, width = 2.0 * half / kBins;
  out.bin_edges.resize(kBins + 1);
  for (int b = 0; b <= kBins; ++b) out.bin_edges[static_cast<std::size_t>(b)] = lo + b * width;
  out.bin_counts.assign(kBins, 0);
  for (const double dev : out.summary.deviations) {
    int b = static_cast<int>(std::floor((dev - lo) / width));
    b = std::clamp(b, 0, kBins - 1);
    ++out.bin_counts[static_cast<std::size_t>(b)];
  }
  return out;
}

TailSample run_tail_sample(const ConductanceLaw& law, int dim, std::int64_t t, std::uint64_t n,
                           std::uint64_t seed, double lambda, const RunOptions& opts,
                           std::uint64_t env_base) {
  check_budget(discrete_projection(n, t, dim), opts);
  struct TailState {
    std::array<std::uint64_t, 5> counts{};
    CompensatedSum exp_sum;
    std::uint64_t draws = 0;
  };
  const double sqrt_t = std::sqrt(static_cast<double>(t));
  auto states = run_blocks<TailState>(
      n, opts.workers, [] { return TailState{}; },
      [&](std::uint64_t i, TailState& st) {
        const std::uint64_t env = env_base + i;
        const EnvironmentField field(law, dim, seed, env);
        WalkRng rng(seed, env, kTagDiscreteWalk);
        const WalkOutcome out = run_discrete_walk(field, rng, t);
        const double norm = out.final_position.l2_norm(dim);
        for (int r = 0; r < 5; ++r)
          if (norm >= r * sqrt_t) ++st.counts[static_cast<std::size_t>(r)];
        st.exp_sum.add(std::exp(lambda * norm * norm / static_cast<double>(t)));
        st.draws += out.draws;
      });
  TailSample out;
  out.n = n;
  std::array<std::uint64_t, 5> counts{};
  CompensatedSum exp_total;
  for (const auto& st : states) {
    for (int r = 0; r < 5; ++r) counts[static_cast<std::size_t>(r)] += st.counts[static_cast<std::size_t>(r)];
    exp_total.merge(st.exp_sum);
    out.draws += st.draws;
  }
  for (int r = 0; r < 5; ++r)
    out.tail[static_cast<std::size_t>(r)] =
        static_cast<double>(counts[static_cast<std::size_t>(r)]) / static_cast<double>(n);
  out.exp_moment = exp_total.value() / static_cast<double>(n);
  return out;
}

DiagnosticsReport run_diagnostics(const StudyPlan& plan, const RunOptions& opts) {
  plan.validate();
  if (plan.mode != StudyMode::diagnostics) throw std::invalid_argument("plan mode is not diagnostics");

  DiagnosticsReport out;
  out.horizons = plan.horizons;
  out.lambda = plan.lambda;
  out.weight_curve_n = {100, 1000, 10000};
  out.weight_curve_reps = 100;

  std::uint64_t projected = 0;
  for (std::size_t i = 0; i < plan.horizons.size(); ++i)
    projected = sat_add(projected, discrete_projection(plan.n_for(i), plan.horizons[i], plan.dim));
  for (const std::uint64_t g : out.weight_curve_n)
    projected = sat_add(projected, sat_mul(g, static_cast<std::uint64_t>(
                                                  out.weight_curve_reps * 2 * plan.dim)));
  check_budget(projected, opts);

  RunOptions unguarded = opts;
  unguarded.budget_draws = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < plan.horizons.size(); ++i) {
    out.tails.push_back(run_tail_sample(plan.law, plan.dim, plan.horizons[i], plan.n_for(i),
                                        plan.seed, plan.lambda, unguarded,
                                        static_cast<std::uint64_t>(i) * kSweepRowStride));
    out.draws += out.tails.back().draws;
  }

  const double ep = mean_site_weight(plan.law, plan.dim);
  const std::uint64_t tasks = out.weight_curve_n.size() * static_cast<std::uint64_t>(out.weight_curve_reps);
  std::vector<double> abs_dev(tasks, 0.0);
  parallel_for(tasks, opts.workers, [&](std::uint64_t task) {
    const std::size_t g = static_cast<std::size_t>(task) / static_cast<std::size_t>(out.weight_curve_reps);
    const std::uint64_t n = out.weight_curve_n[g];
    const std::uint64_t base = kWeightCurveBase + task * kRepetitionStride;
    CompensatedSum sum;
    for (std::uint64_t i = 0; i < n; ++i) {
      const EnvironmentField field(plan.law, plan.dim, plan.seed, base + i);
      sum.add(field.site_weight(Site{}));
    }
    const double p_hat = sum.value() / (static_cast<double>(n) * ep);
    abs_dev[static_cast<std::size_t>(task)] = std::fabs(p_hat - 1.0);
  });
  for (std::size_t g = 0; g < out.weight_curve_n.size(); ++g) {
    const auto lo = g * static_cast<std::size_t>(out.weight_curve_reps);
    out.weight_curve_abs_dev.emplace_back(abs_dev.begin() + static_cast<std::ptrdiff_t>(lo),
                                          abs_dev.begin() + static_cast<std::ptrdiff_t>(lo + static_cast<std::size_t>(out.weight_curve_reps)));
    out.draws += out.weight_curve_n[g] * static_cast<std::uint64_t>(out.weight_curve_reps * 2 * plan.dim);
  }
  return out;
}

EstimateRun run_estimate(const ConductanceLaw& law, int dim, const Direction& xi, std::int64_t t,
                         std::uint64_t n, std::uint64_t seed, const RunOptions& opts,
                         std::uint64_t env_base) {
  if (xi.dim != dim) throw std::invalid_argument("xi dimension does not match d");
  if (t < 1) throw std::invalid_argument("horizon must be >= 1");
  if (n < 2) throw std::invalid_argument("estimate requires n >= 2");
  check_budget(discrete_projection(n, t, dim), opts);
  const auto start = std::chrono::steady_clock::now();
  const EstimatorState state =
      run_discrete_population(law, dim, xi, t, n, seed, env_base, opts.workers);
  EstimateRun out;
  out.report = report(state, law, dim);
  out.draws = state.draws();
  out.wall_seconds = elapsed_seconds(start);
  return out;
}

ContinuousEstimate run_continuous_estimate(const ConductanceLaw& law, int dim, const Direction& xi,
                                           double t, std::uint64_t n, std::uint64_t seed,
                                           const RunOptions& opts, std::uint64_t env_base) {
  if (xi.dim != dim) throw std::invalid_argument("xi dimension does not match d");
  if (!(t > 0)) throw std::invalid_argument("horizon must be positive");
  if (n < 2) throw std::invalid_argument("estimate requires n >= 2");
  const auto expected_jumps =
      static_cast<std::uint64_t>(mean_site_weight(law, dim) * t) + 1;
  check_budget(sat_mul(n, sat_mul(expected_jumps, static_cast<std::uint64_t>(2 * dim + 2))), opts);

  struct ContState {
    CompensatedSum s1, s2;
    std::uint64_t draws = 0;
  };
  auto states = run_blocks<ContState>(
      n, opts.workers, [] { return ContState{}; },
      [&](std::uint64_t i, ContState& st) {
        const std::uint64_t env = env_base + i;
        const EnvironmentField field(law, dim, seed, env);
        WalkRng rng(seed, env, kTagContinuousWalk);
        const WalkOutcome out = run_continuous_walk(field, rng, t);
        const double q = xi.dot(out.final_position);
        const double v = q * q / t;
        st.s1.add(v);
        st.s2.add(v * v);
        st.draws += out.draws;
      });
  CompensatedSum s1, s2;
  std::uint64_t draws = 0;
  for (const auto& st : states) {
    s1.merge(st.s1);
    s2.merge(st.s2);
    draws += st.draws;
  }
  ContinuousEstimate out;
  out.n = n;
  out.t = t;
  out.draws = draws;
  const double nn = static_cast<double>(n);
  out.mean2 = s1.value() / nn;
  double var = s2.value() / nn - out.mean2 * out.mean2;
  if (!(var > 0)) var = 0;
  out.ci_halfwidth = kZ95 * std::sqrt(var / nn);
  return out;
}

}  // namespace rwre
