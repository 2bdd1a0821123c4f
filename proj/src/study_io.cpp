#include <cstdio>
#include <string>

#include <json.hpp>

#include "rwre/study.hpp"

namespace rwre {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* mode_name(StudyMode mode) {
  switch (mode) {
    case StudyMode::sweep: return "sweep";
    case StudyMode::fluctuations: return "fluctuations";
    case StudyMode::diagnostics: return "diagnostics";
  }
  return "sweep";
}

ordered_json law_json(const ConductanceLaw& law) {
  auto axis_obj = [&](const AxisParams& p) {
    ordered_json o;
    o["alpha"] = p.alpha;
    o["beta"] = p.beta;
    if (law.kind() == LawKind::two_point) o["prob_alpha"] = p.prob_alpha;
    return o;
  };
  ordered_json o;
  o["kind"] = law.kind() == LawKind::two_point ? "two_point" : "uniform";
  {
    const AxisParams& p = law.axis_params(0);
    o["alpha"] = p.alpha;
    o["beta"] = p.beta;
    if (law.kind() == LawKind::two_point) o["prob_alpha"] = p.prob_alpha;
  }
  if (law.has_axis_overrides()) {
    ordered_json axes = ordered_json::array();
    for (int a = 0; a < kMaxDim; ++a) axes.push_back(axis_obj(law.axis_params(a)));
    o["axes"] = axes;
  }
  return o;
}

ordered_json plan_json(const StudyPlan& plan) {
  ordered_json o;
  o["mode"] = mode_name(plan.mode);
  o["law"] = law_json(plan.law);
  o["d"] = plan.dim;
  ordered_json xi = ordered_json::array();
  for (int a = 0; a < plan.dim; ++a) xi.push_back(plan.xi.v[static_cast<std::size_t>(a)]);
  o["xi"] = xi;
  o["horizons"] = plan.horizons;
  o["replication"] = plan.replication;
  o["scale"] = plan.scale;
  if (plan.explicit_n > 0) o["n"] = plan.explicit_n;
  o["seed"] = plan.seed;
  if (plan.mode == StudyMode::fluctuations) o["repetitions"] = plan.repetitions;
  if (plan.mode == StudyMode::diagnostics) o["lambda"] = plan.lambda;
  return o;
}

ordered_json parse_or_empty(const std::string& config_json) {
  if (config_json.empty()) return ordered_json::object();
  return ordered_json::parse(config_json, nullptr, false).is_discarded()
             ? ordered_json::object()
             : ordered_json::parse(config_json);
}

std::string config_line(const std::string& config_json) {
  return config_json.empty() ? std::string("{}") : config_json;
}

ordered_json record_json(const StudyRecord& r) {
  ordered_json o;
  o["t"] = r.t;
  o["n"] = r.n;
  o["a_hat"] = r.a_hat;
  o["ahom_direction"] = r.ahom_direction;
  if (r.has_reference)
    o["systematic_error"] = r.systematic_error;
  else
    o["systematic_error"] = nullptr;
  o["ci_halfwidth"] = r.ci_halfwidth;
  o["wall_seconds"] = r.wall_seconds;
  o["draws"] = r.draws;
  return o;
}

}  // namespace

std::string plan_to_json(const StudyPlan& plan) { return plan_json(plan).dump(); }

std::string sweep_csv(const StudyPlan& plan, const std::vector<StudyRecord>& records,
                      const std::string& config_json) {
  std::string out;
  out += "# config: " + config_line(config_json) + "\n";
  out += "# plan: " + plan_to_json(plan) + "\n";
  out += "# seed: " + std::to_string(plan.seed) + "\n";
  out += "t,n,a_hat,ahom_direction,systematic_error,ci_halfwidth,wall_seconds,draws\n";
  for (const auto& r : records) {
    out += std::to_string(r.t) + "," + std::to_string(r.n) + "," + fmt(r.a_hat) + "," +
           fmt(r.ahom_direction) + ",";
    if (r.has_reference) out += fmt(r.systematic_error);
    out += "," + fmt(r.ci_halfwidth) + "," + fmt(r.wall_seconds) + "," + std::to_string(r.draws) +
           "\n";
  }
  return out;
}

std::string fit_json(const StudyPlan& plan, const std::vector<StudyRecord>& records,
                     const std::optional<RateFit>& fit, const std::string& fit_skip_reason,
                     const std::string& config_json, double wall_seconds) {
  ordered_json o;
  o["config"] = parse_or_empty(config_json);
  o["plan"] = plan_json(plan);
  o["seed"] = plan.seed;
  ordered_json recs = ordered_json::array();
  for (const auto& r : records) recs.push_back(record_json(r));
  o["records"] = recs;
  if (fit) {
    ordered_json f;
    f["slope"] = fit->slope;
    f["intercept"] = fit->intercept;
    f["residual_se"] = fit->residual_se;
    f["points"] = fit->points;
    o["fit"] = f;
  } else {
    o["fit"] = nullptr;
    o["fit_skipped"] = fit_skip_reason;
  }
  o["wall_seconds"] = wall_seconds;
  return o.dump(2) + "\n";
}

std::string fluct_csv(const StudyPlan& plan, const FluctuationStudy& study,
                      const std::string& config_json) {
  ordered_json moments;
  moments["t"] = study.t;
  moments["n"] = study.n;
  moments["m"] = study.m;
  moments["mean"] = study.summary.mean;
  moments["variance"] = study.summary.variance;
  moments["sd"] = study.summary.sd;
  moments["skewness"] = study.summary.skewness;
  moments["excess_kurtosis"] = study.summary.excess_kurtosis;
  moments["draws"] = study.draws;

  std::string out;
  out += "# config: " + config_line(config_json) + "\n";
  out += "# plan: " + plan_to_json(plan) + "\n";
  out += "# seed: " + std::to_string(plan.seed) + "\n";
  out += "# moments: " + moments.dump() + "\n";
  out += "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < study.bin_counts.size(); ++b)
    out += fmt(study.bin_edges[b]) + "," + fmt(study.bin_edges[b + 1]) + "," +
           std::to_string(study.bin_counts[b]) + "\n";
  return out;
}

std::string diag_json(const StudyPlan& plan, const DiagnosticsReport& report,
                      const std::string& config_json, double wall_seconds) {
  ordered_json o;
  o["config"] = parse_or_empty(config_json);
  o["plan"] = plan_json(plan);
  o["seed"] = plan.seed;
  o["lambda"] = report.lambda;
  ordered_json tails = ordered_json::array();
  for (std::size_t i = 0; i < report.tails.size(); ++i) {
    const TailSample& ts = report.tails[i];
    ordered_json row;
    row["t"] = report.horizons[i];
    row["n"] = ts.n;
    row["tail"] = ts.tail;
    row["exp_moment"] = ts.exp_moment;
    row["draws"] = ts.draws;
    tails.push_back(row);
  }
  o["tails"] = tails;
  ordered_json curve;
  curve["n"] = report.weight_curve_n;
  curve["reps"] = report.weight_curve_reps;
  curve["abs_dev"] = report.weight_curve_abs_dev;
  ordered_json max_dev = ordered_json::array(), mean_dev = ordered_json::array();
  for (const auto& grid : report.weight_curve_abs_dev) {
    double mx = 0, sum = 0;
    for (const double v : grid) {
      mx = std::max(mx, v);
      sum += v;
    }
    max_dev.push_back(mx);
    mean_dev.push_back(grid.empty() ? 0.0 : sum / static_cast<double>(grid.size()));
  }
  curve["max_abs_dev"] = max_dev;
  curve["mean_abs_dev"] = mean_dev;
  o["weight_curve"] = curve;
  o["draws"] = report.draws;
  o["wall_seconds"] = wall_seconds;
  return o.dump(2) + "\n";
}

}  // namespace rwre
