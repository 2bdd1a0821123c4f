#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/conductance_law.hpp"
#include "rwre/estimator.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

enum class StudyMode { sweep, fluctuations, diagnostics };

// Environment-index bases keeping the walk populations of one output disjoint.
inline constexpr std::uint64_t kSweepRowStride = std::uint64_t(1) << 48;
inline constexpr std::uint64_t kRepetitionStride = std::uint64_t(1) << 40;
inline constexpr std::uint64_t kWeightCurveBase = std::uint64_t(3) << 60;

struct StudyPlan {
  ConductanceLaw law = ConductanceLaw::two_point(1.0, 4.0, 0.5);
  int dim = 2;
  Direction xi = Direction::axis(0, 2);
  std::vector<std::int64_t> horizons;
  std::vector<std::uint64_t> replication;  // base K(t); n(t) = round(K*scale) * t^2
  double scale = 1.0;
  std::uint64_t explicit_n = 0;  // when nonzero (single-horizon plans), overrides K(t)*t^2
  std::uint64_t seed = 0;
  StudyMode mode = StudyMode::sweep;
  std::uint64_t repetitions = 0;  // m, fluctuations mode
  double lambda = 0.05;           // diagnostics exp-moment parameter

  void validate() const;
  std::uint64_t n_for(std::size_t i) const;

  // Built-in horizon/replication schedule behind the --table1 flag.
  static std::vector<std::int64_t> table1_horizons();
  static std::vector<std::uint64_t> table1_replication();
};

struct RunOptions {
  unsigned workers = 1;
  std::uint64_t budget_draws = std::numeric_limits<std::uint64_t>::max();
};

class BudgetError : public std::runtime_error {
 public:
  BudgetError(std::uint64_t projected, std::uint64_t budget);
  std::uint64_t projected;
  std::uint64_t budget;
};

struct StudyRecord {
  std::int64_t t = 0;
  std::uint64_t n = 0;
  double a_hat = 0;
  double ahom_direction = 0;
  bool has_reference = false;
  double systematic_error = 0;  // |xi.A_ref xi - ahom_direction| when known
  double ci_halfwidth = 0;      // 95% half-width on the ahom_direction scale
  double wall_seconds = 0;
  std::uint64_t draws = 0;
};

struct RateFit {
  double slope = 0;
  double intercept = 0;
  double residual_se = 0;
  std::size_t points = 0;
};

struct FluctuationStudy {
  std::int64_t t = 0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  FluctuationSummary summary;
  std::vector<double> bin_edges;        // 62 edges over +-6 sample SD
  std::vector<std::uint64_t> bin_counts;  // 61 bins; outliers clamp to end bins
  std::uint64_t draws = 0;
};

struct TailSample {
  std::array<double, 5> tail{};  // P[|Y(t)| >= r sqrt(t)], r = 0..4
  double exp_moment = 0;         // mean exp(lambda |Y(t)|^2 / t)
  std::uint64_t n = 0;
  std::uint64_t draws = 0;
};

struct DiagnosticsReport {
  std::vector<std::int64_t> horizons;
  std::vector<TailSample> tails;  // one per horizon
  double lambda = 0.05;
  std::vector<std::uint64_t> weight_curve_n;            // {100, 1000, 10000}
  int weight_curve_reps = 0;                            // 100
  std::vector<std::vector<double>> weight_curve_abs_dev;  // [grid][rep] |p_hat - 1|
  std::uint64_t draws = 0;
};

struct EstimateRun {
  EstimateReport report;
  std::uint64_t draws = 0;
  double wall_seconds = 0;
};

struct ContinuousEstimate {
  double mean2 = 0;  // mean (xi.X(t))^2 / t, estimates 2 xi.A_hom xi
  double ci_halfwidth = 0;
  std::uint64_t n = 0;
  double t = 0;
  std::uint64_t draws = 0;
};

// xi.A_hom xi when a closed form exists: constant laws (A_hom = c Id in any d)
// and the d=2 symmetric two-point law (Dykhne, sqrt(alpha beta) Id).
std::optional<double> reference_ahom(const ConductanceLaw& law, int dim);

std::vector<StudyRecord> run_sweep(const StudyPlan& plan, const RunOptions& opts = {});
RateFit fit_rate(const std::vector<StudyRecord>& records);
FluctuationStudy run_fluctuations(const StudyPlan& plan, const RunOptions& opts = {});
DiagnosticsReport run_diagnostics(const StudyPlan& plan, const RunOptions& opts = {});

EstimateRun run_estimate(const ConductanceLaw& law, int dim, const Direction& xi, std::int64_t t,
                         std::uint64_t n, std::uint64_t seed, const RunOptions& opts = {},
                         std::uint64_t env_base = 0);
ContinuousEstimate run_continuous_estimate(const ConductanceLaw& law, int dim, const Direction& xi,
                                           double t, std::uint64_t n, std::uint64_t seed,
                                           const RunOptions& opts = {}, std::uint64_t env_base = 0);
TailSample run_tail_sample(const ConductanceLaw& law, int dim, std::int64_t t, std::uint64_t n,
                           std::uint64_t seed, double lambda, const RunOptions& opts = {},
                           std::uint64_t env_base = 0);

// Serialization (CSV columns per record type; JSON embeds plan + seed + config).
std::string plan_to_json(const StudyPlan& plan);
std::string sweep_csv(const StudyPlan& plan, const std::vector<StudyRecord>& records,
                      const std::string& config_json);
std::string fit_json(const StudyPlan& plan, const std::vector<StudyRecord>& records,
                     const std::optional<RateFit>& fit, const std::string& fit_skip_reason,
                     const std::string& config_json, double wall_seconds);
std::string fluct_csv(const StudyPlan& plan, const FluctuationStudy& study,
                      const std::string& config_json);
std::string diag_json(const StudyPlan& plan, const DiagnosticsReport& report,
                      const std::string& config_json, double wall_seconds);

}  // namespace rwre
