#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwre/env_field.hpp"
#include "rwre/oracle.hpp"
#include "rwre/study.hpp"
#include "rwre/walker.hpp"

namespace {

using nlohmann::ordered_json;
using namespace rwre;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;
constexpr int kExitInvalidParams = 65;
constexpr int kExitBudget = 69;
constexpr int kExitInternal = 70;
constexpr int kExitWriteFailure = 74;

struct CliError : std::runtime_error {
  int code;
  CliError(int code_, const std::string& msg) : std::runtime_error(msg), code(code_) {}
};

std::uint64_t parse_seed(const std::string& spec) {
  if (spec.empty() || spec[0] == '-' || spec[0] == '+')
    throw CliError(kExitInvalidParams, "seed must be a non-negative decimal or 0x-prefixed integer");
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(spec, &pos, 0);
  } catch (const std::exception&) {
    throw CliError(kExitInvalidParams, "cannot parse seed '" + spec + "'");
  }
  if (pos != spec.size()) throw CliError(kExitInvalidParams, "cannot parse seed '" + spec + "'");
  return static_cast<std::uint64_t>(value);
}

std::vector<double> parse_components(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw CliError(kExitInvalidParams, "cannot parse direction component '" + item + "'");
    }
    if (pos != item.size())
      throw CliError(kExitInvalidParams, "cannot parse direction component '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CliError(kExitInvalidParams, "direction needs at least one component");
  return out;
}

struct Common {
  std::string law_spec = "two_point:1,4,0.5";
  int d = 2;
  std::string xi_spec;
  std::string seed_spec;
  unsigned workers = 1;
  std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();
  std::string out_dir = ".";
  std::string config_path;

  ordered_json config = ordered_json::object();
  std::uint64_t seed = 0;
  bool seed_from_entropy = false;
  ConductanceLaw law = ConductanceLaw::two_point(1.0, 4.0, 0.5);
  Direction xi = Direction::axis(0, 2);
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--law", c.law_spec,
                  "conductance law: two_point:a,b,p | uniform:a,b | constant:c");
  sub->add_option("--d", c.d, "lattice dimension, 1..8");
  sub->add_option("--xi", c.xi_spec, "direction as comma-separated components, normalized on input");
  sub->add_option("--seed", c.seed_spec,
                  "RNG seed, decimal or 0x-prefixed hex; falls back to RWRE_SEED, then entropy");
  sub->add_option("--workers", c.workers, "worker threads (results are worker-count independent)");
  sub->add_option("--budget-draws", c.budget,
                  "refuse to start if the projected number of randomness draws exceeds this");
  sub->add_option("--out-dir", c.out_dir, "directory for output files");
  sub->add_option("--config", c.config_path, "flat JSON config file; flags override file values");
}

// Flags override config-file keys, which override built-in defaults.
void resolve_common(CLI::App* sub, Common& c) {
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw CliError(kExitInvalidParams, "cannot open config file " + c.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    c.config = ordered_json::parse(buf.str(), nullptr, false);
    if (c.config.is_discarded() || !c.config.is_object())
      throw CliError(kExitInvalidParams, "config file must hold one flat JSON object");
  }
  auto unset = [&](const char* flag) { return sub->count(flag) == 0; };
  try {
    if (unset("--law") && c.config.contains("law")) c.law_spec = c.config.at("law").get<std::string>();
    if (unset("--d") && c.config.contains("d")) c.d = c.config.at("d").get<int>();
    if (unset("--xi") && c.config.contains("xi")) {
      const auto& x = c.config.at("xi");
      if (x.is_string()) {
        c.xi_spec = x.get<std::string>();
      } else {
        std::string joined;
        for (const auto& v : x) {
          if (!joined.empty()) joined += ',';
          joined += std::to_string(v.get<double>());
        }
        c.xi_spec = joined;
      }
    }
    if (unset("--workers") && c.config.contains("workers"))
      c.workers = c.config.at("workers").get<unsigned>();
    if (unset("--budget-draws") && c.config.contains("budget_draws"))
      c.budget = c.config.at("budget_draws").get<std::uint64_t>();
    if (unset("--out-dir") && c.config.contains("out_dir"))
      c.out_dir = c.config.at("out_dir").get<std::string>();
    if (unset("--seed")) {
      if (c.config.contains("seed")) {
        const auto& s = c.config.at("seed");
        c.seed_spec = s.is_string() ? s.get<std::string>() : std::to_string(s.get<std::uint64_t>());
      } else if (const char* env = std::getenv("RWRE_SEED"); env != nullptr && *env != '\0') {
        c.seed_spec = env;
      }
    }
  } catch (const ordered_json::exception& e) {
    throw CliError(kExitInvalidParams, std::string("bad config value: ") + e.what());
  }

  if (c.seed_spec.empty()) {
    std::random_device rd;
    c.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    c.seed_from_entropy = true;
  } else {
    c.seed = parse_seed(c.seed_spec);
  }
  c.law = ConductanceLaw::parse(c.law_spec);
  if (c.d < 1 || c.d > kMaxDim) throw CliError(kExitInvalidParams, "dimension must lie in [1, 8]");
  if (c.xi_spec.empty()) {
    c.xi = Direction::axis(0, c.d);
  } else {
    const auto comps = parse_components(c.xi_spec);
    if (static_cast<int>(comps.size()) != c.d)
      throw CliError(kExitInvalidParams, "direction must have exactly d components");
    c.xi = Direction::from_components(comps);
  }
  if (c.seed_from_entropy)
    std::fprintf(stderr, "seed: %llu (generated from entropy; pass --seed %llu to reproduce)\n",
                 static_cast<unsigned long long>(c.seed),
                 static_cast<unsigned long long>(c.seed));
}

ordered_json config_head(const Common& c, const char* mode) {
  ordered_json cfg;
  cfg["mode"] = mode;
  cfg["law"] = c.law.label();
  cfg["d"] = c.d;
  ordered_json xi = ordered_json::array();
  for (int i = 0; i < c.d; ++i) xi.push_back(c.xi.v[static_cast<std::size_t>(i)]);
  cfg["xi"] = xi;
  return cfg;
}

void config_tail(const Common& c, ordered_json& cfg, bool with_out_dir) {
  cfg["seed"] = c.seed;
  cfg["workers"] = c.workers;
  if (c.budget != std::numeric_limits<std::uint64_t>::max()) cfg["budget_draws"] = c.budget;
  if (with_out_dir) cfg["out_dir"] = c.out_dir;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CliError(kExitWriteFailure, "cannot create output directory " + dir);
  const std::string path = dir + "/" + name;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << content;
  os.flush();
  if (!os) throw CliError(kExitWriteFailure, "cannot write " + path);
}

RunOptions options_of(const Common& c) {
  RunOptions opts;
  opts.workers = c.workers;
  opts.budget_draws = c.budget;
  return opts;
}

int run_estimate_cmd(const Common& c, std::int64_t t, std::uint64_t n, bool trace) {
  const EstimateRun run = run_estimate(c.law, c.d, c.xi, t, n, c.seed, options_of(c));
  ordered_json cfg = config_head(c, "estimate");
  cfg["t"] = t;
  cfg["n"] = n;
  cfg["trace"] = trace;
  config_tail(c, cfg, false);
  std::printf("# config: %s\n", cfg.dump().c_str());
  if (trace) {
    // Replays the estimate's walk 0 (same environment and stream) and logs it.
    const EnvironmentField field(c.law, c.d, c.seed, 0);
    WalkRng rng(c.seed, 0, kTagDiscreteWalk);
    std::vector<Site> path;
    run_discrete_walk(field, rng, t, &path);
    ordered_json tr = ordered_json::array();
    for (const Site& x : path) {
      ordered_json pt = ordered_json::array();
      for (int i = 0; i < c.d; ++i) pt.push_back(x[i]);
      tr.push_back(pt);
    }
    std::printf("# trace: %s\n", tr.dump().c_str());
  }
  std::printf("%s\n", EstimateReport::csv_header().c_str());
  std::printf("%s\n", run.report.csv_row(c.seed).c_str());
  return kExitOk;
}

struct SweepArgs {
  bool table1 = false;
  double scale = 1.0;
  std::int64_t max_t = 0;
  std::vector<std::int64_t> horizons;
  std::vector<std::uint64_t> replication;
};

void resolve_sweep_args(CLI::App* sub, const Common& c, SweepArgs& a) {
  auto unset = [&](const char* flag) { return sub->count(flag) == 0; };
  try {
    if (unset("--table1") && c.config.contains("table1")) a.table1 = c.config.at("table1").get<bool>();
    if (unset("--scale") && c.config.contains("scale")) a.scale = c.config.at("scale").get<double>();
    if (unset("--max-t") && c.config.contains("max_t")) a.max_t = c.config.at("max_t").get<std::int64_t>();
    if (unset("--horizons") && c.config.contains("horizons"))
      a.horizons = c.config.at("horizons").get<std::vector<std::int64_t>>();
    if (unset("--k") && c.config.contains("k"))
      a.replication = c.config.at("k").get<std::vector<std::uint64_t>>();
  } catch (const ordered_json::exception& e) {
    throw CliError(kExitInvalidParams, std::string("bad config value: ") + e.what());
  }
}

int run_sweep_cmd(const Common& c, const SweepArgs& a) {
  StudyPlan plan;
  plan.law = c.law;
  plan.dim = c.d;
  plan.xi = c.xi;
  plan.seed = c.seed;
  plan.scale = a.scale;
  plan.mode = StudyMode::sweep;
  if (a.table1) {
    plan.horizons = StudyPlan::table1_horizons();
    plan.replication = StudyPlan::table1_replication();
    if (a.max_t > 0) {
      while (!plan.horizons.empty() && plan.horizons.back() > a.max_t) {
        plan.horizons.pop_back();
        plan.replication.pop_back();
      }
    }
  } else if (!a.horizons.empty()) {
    plan.horizons = a.horizons;
    if (a.replication.empty())
      plan.replication.assign(plan.horizons.size(), 100);
    else if (a.replication.size() == 1)
      plan.replication.assign(plan.horizons.size(), a.replication[0]);
    else if (a.replication.size() == plan.horizons.size())
      plan.replication = a.replication;
    else
      throw CliError(kExitInvalidParams, "--k needs one value or one value per horizon");
  } else {
    throw CliError(kExitUsage, "sweep needs --table1 or --horizons");
  }

  ordered_json cfg = config_head(c, "sweep");
  cfg["table1"] = a.table1;
  cfg["horizons"] = plan.horizons;
  cfg["k"] = plan.replication;
  cfg["scale"] = a.scale;
  if (a.max_t > 0) cfg["max_t"] = a.max_t;
  config_tail(c, cfg, true);
  const std::string cfg_text = cfg.dump();

  const auto start = std::chrono::steady_clock::now();
  const std::vector<StudyRecord> records = run_sweep(plan, options_of(c));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::optional<RateFit> fit;
  std::string skip_reason;
  std::size_t usable = 0;
  for (const auto& r : records)
    if (r.has_reference && r.systematic_error > 0) ++usable;
  if (usable >= 3)
    fit = fit_rate(records);
  else
    skip_reason = "rate fit needs at least 3 rows with a reference value and positive error";

  write_file(c.out_dir, "sweep.csv", sweep_csv(plan, records, cfg_text));
  write_file(c.out_dir, "fit.json", fit_json(plan, records, fit, skip_reason, cfg_text, wall));
  std::printf("wrote %s/sweep.csv (%zu rows) and %s/fit.json\n", c.out_dir.c_str(), records.size(),
              c.out_dir.c_str());
  if (fit)
    std::printf("rate fit: slope %.17g, intercept %.17g, residual se %.17g\n", fit->slope,
                fit->intercept, fit->residual_se);
  else
    std::printf("rate fit skipped: %s\n", skip_reason.c_str());
  return kExitOk;
}

int run_fluctuations_cmd(const Common& c, std::int64_t t, std::uint64_t n, std::uint64_t k,
                         std::uint64_t m, double scale) {
  StudyPlan plan;
  plan.law = c.law;
  plan.dim = c.d;
  plan.xi = c.xi;
  plan.seed = c.seed;
  plan.scale = scale;
  plan.mode = StudyMode::fluctuations;
  plan.horizons = {t};
  plan.replication = {k};
  plan.explicit_n = n;
  plan.repetitions = m;

  ordered_json cfg = config_head(c, "fluctuations");
  cfg["t"] = t;
  if (n > 0) cfg["n"] = n;
  cfg["k"] = k;
  cfg["m"] = m;
  cfg["scale"] = scale;
  config_tail(c, cfg, true);

  const FluctuationStudy study = run_fluctuations(plan, options_of(c));
  write_file(c.out_dir, "fluctuations.csv", fluct_csv(plan, study, cfg.dump()));
  std::printf("wrote %s/fluctuations.csv\n", c.out_dir.c_str());
  std::printf("moments: sd %.17g, skewness %.17g, excess kurtosis %.17g (t %lld, n %llu, m %llu)\n",
              study.summary.sd, study.summary.skewness, study.summary.excess_kurtosis,
              static_cast<long long>(study.t), static_cast<unsigned long long>(study.n),
              static_cast<unsigned long long>(study.m));
  return kExitOk;
}

int run_diagnostics_cmd(const Common& c, const std::vector<std::int64_t>& horizons,
                        const std::vector<std::uint64_t>& k, double lambda, double scale) {
  StudyPlan plan;
  plan.law = c.law;
  plan.dim = c.d;
  plan.xi = c.xi;
  plan.seed = c.seed;
  plan.scale = scale;
  plan.mode = StudyMode::diagnostics;
  plan.lambda = lambda;
  plan.horizons = horizons;
  if (k.empty())
    plan.replication.assign(horizons.size(), 25);
  else if (k.size() == 1)
    plan.replication.assign(horizons.size(), k[0]);
  else if (k.size() == horizons.size())
    plan.replication = k;
  else
    throw CliError(kExitInvalidParams, "--k needs one value or one value per horizon");

  ordered_json cfg = config_head(c, "diagnostics");
  cfg["horizons"] = plan.horizons;
  cfg["k"] = plan.replication;
  cfg["lambda"] = lambda;
  cfg["scale"] = scale;
  config_tail(c, cfg, true);

  const auto start = std::chrono::steady_clock::now();
  const DiagnosticsReport rep = run_diagnostics(plan, options_of(c));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(c.out_dir, "diagnostics.json", diag_json(plan, rep, cfg.dump(), wall));
  std::printf("wrote %s/diagnostics.json\n", c.out_dir.c_str());
  for (std::size_t i = 0; i < rep.tails.size(); ++i)
    std::printf("t %lld: tail(2sqrt(t)) %.17g, tail(4sqrt(t)) %.17g, exp moment %.17g\n",
                static_cast<long long>(rep.horizons[i]), rep.tails[i].tail[2], rep.tails[i].tail[4],
                rep.tails[i].exp_moment);
  return kExitOk;
}

int run_oracle_check_cmd(const Common& c, std::int64_t t, std::int64_t radius,
                         std::uint64_t env_index) {
  const EnvironmentField field(c.law, c.d, c.seed, env_index);
  const ExactKernel kernel = exact_distribution(field, t);
  const BalanceReport balance = check_detailed_balance(field, radius);

  ordered_json cfg = config_head(c, "oracle-check");
  cfg["t"] = t;
  cfg["radius"] = radius;
  cfg["env_index"] = env_index;
  config_tail(c, cfg, true);

  std::ostringstream csv;
  csv << "# config: " << cfg.dump() << "\n";
  kernel.write_csv(csv);
  write_file(c.out_dir, "kernel.csv", csv.str());

  const double mass_defect = std::fabs(static_cast<double>(kernel.total_mass() - 1.0L));
  std::printf("wrote %s/kernel.csv\n", c.out_dir.c_str());
  std::printf("sigma_sq_direction: %.17g\n", kernel.sigma_sq(c.xi));
  std::printf("total_mass_defect: %.17g\n", mass_defect);
  std::printf("detailed_balance: %s (max violation %.17g over radius %lld)\n",
              balance.balanced ? "ok" : "violated", balance.max_violation,
              static_cast<long long>(radius));
  return balance.balanced ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo homogenization of random-conductance lattice walks"};
  app.require_subcommand(1);

  Common common;

  auto* est = app.add_subcommand("estimate", "one direction-projected estimate, CSV on stdout");
  std::int64_t est_t = 10;
  std::uint64_t est_n = 10000;
  bool est_trace = false;
  add_common(est, common);
  est->add_option("--t", est_t, "walk horizon");
  est->add_option("--n", est_n, "number of independent (environment, walk) samples");
  est->add_flag("--trace", est_trace, "log walk 0's full path as a comment line");

  auto* swp = app.add_subcommand("sweep", "systematic-error sweep over horizons; writes sweep.csv + fit.json");
  SweepArgs sweep_args;
  add_common(swp, common);
  swp->add_flag("--table1", sweep_args.table1, "use the built-in horizon/replication schedule");
  swp->add_option("--scale", sweep_args.scale, "replication multiplier");
  swp->add_option("--max-t", sweep_args.max_t, "drop schedule rows with horizon above this");
  swp->add_option("--horizons", sweep_args.horizons, "explicit horizon list")->delimiter(',');
  swp->add_option("--k", sweep_args.replication, "replication K per horizon (n = K t^2)")->delimiter(',');

  auto* flc = app.add_subcommand("fluctuations", "repeated estimates at one horizon; writes fluctuations.csv");
  std::int64_t flc_t = 10;
  std::uint64_t flc_n = 0;
  std::uint64_t flc_k = 1;
  std::uint64_t flc_m = 1000;
  double flc_scale = 1.0;
  add_common(flc, common);
  flc->add_option("--t", flc_t, "walk horizon");
  flc->add_option("--n", flc_n, "walks per repetition (default K t^2)");
  flc->add_option("--k", flc_k, "replication K when --n is absent");
  flc->add_option("--m", flc_m, "number of repetitions");
  flc->add_option("--scale", flc_scale, "replication multiplier");

  auto* dgn = app.add_subcommand("diagnostics", "tail and normalizer diagnostics; writes diagnostics.json");
  std::vector<std::int64_t> dgn_horizons = {16, 64};
  std::vector<std::uint64_t> dgn_k;
  double dgn_lambda = 0.05;
  double dgn_scale = 1.0;
  add_common(dgn, common);
  dgn->add_option("--horizons", dgn_horizons, "horizon list")->delimiter(',');
  dgn->add_option("--k", dgn_k, "replication K per horizon (n = K t^2)")->delimiter(',');
  dgn->add_option("--lambda", dgn_lambda, "exponential moment parameter");
  dgn->add_option("--scale", dgn_scale, "replication multiplier");

  auto* orc = app.add_subcommand("oracle-check", "exact kernel + reversibility check for one environment");
  std::int64_t orc_t = 8;
  std::int64_t orc_radius = 8;
  std::uint64_t orc_env = 0;
  add_common(orc, common);
  orc->add_option("--t", orc_t, "kernel horizon");
  orc->add_option("--radius", orc_radius, "detailed-balance check radius (L1 ball)");
  orc->add_option("--env-index", orc_env, "environment index to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "rwre: error: usage: %s\n", e.what());
    return kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    resolve_common(active, common);
    if (active == est) {
      std::int64_t t = est_t;
      std::uint64_t n = est_n;
      if (est->count("--t") == 0 && common.config.contains("t")) t = common.config.at("t").get<std::int64_t>();
      if (est->count("--n") == 0 && common.config.contains("n")) n = common.config.at("n").get<std::uint64_t>();
      if (est->count("--trace") == 0 && common.config.contains("trace"))
        est_trace = common.config.at("trace").get<bool>();
      return run_estimate_cmd(common, t, n, est_trace);
    }
    if (active == swp) {
      resolve_sweep_args(swp, common, sweep_args);
      return run_sweep_cmd(common, sweep_args);
    }
    if (active == flc) {
      if (flc->count("--t") == 0 && common.config.contains("t")) flc_t = common.config.at("t").get<std::int64_t>();
      if (flc->count("--n") == 0 && common.config.contains("n")) flc_n = common.config.at("n").get<std::uint64_t>();
      if (flc->count("--k") == 0 && common.config.contains("k")) flc_k = common.config.at("k").get<std::uint64_t>();
      if (flc->count("--m") == 0 && common.config.contains("m")) flc_m = common.config.at("m").get<std::uint64_t>();
      if (flc->count("--scale") == 0 && common.config.contains("scale"))
        flc_scale = common.config.at("scale").get<double>();
      return run_fluctuations_cmd(common, flc_t, flc_n, flc_k, flc_m, flc_scale);
    }
    if (active == dgn) {
      if (dgn->count("--horizons") == 0 && common.config.contains("horizons"))
        dgn_horizons = common.config.at("horizons").get<std::vector<std::int64_t>>();
      if (dgn->count("--k") == 0 && common.config.contains("k"))
        dgn_k = common.config.at("k").get<std::vector<std::uint64_t>>();
      if (dgn->count("--lambda") == 0 && common.config.contains("lambda"))
        dgn_lambda = common.config.at("lambda").get<double>();
      if (dgn->count("--scale") == 0 && common.config.contains("scale"))
        dgn_scale = common.config.at("scale").get<double>();
      return run_diagnostics_cmd(common, dgn_horizons, dgn_k, dgn_lambda, dgn_scale);
    }
    if (active == orc) {
      if (orc->count("--t") == 0 && common.config.contains("t")) orc_t = common.config.at("t").get<std::int64_t>();
      if (orc->count("--radius") == 0 && common.config.contains("radius"))
        orc_radius = common.config.at("radius").get<std::int64_t>();
      if (orc->count("--env-index") == 0 && common.config.contains("env_index"))
        orc_env = common.config.at("env_index").get<std::uint64_t>();
      return run_oracle_check_cmd(common, orc_t, orc_radius, orc_env);
    }
    std::fprintf(stderr, "rwre: error: usage: no subcommand selected\n");
    return kExitUsage;
  } catch (const CliError& e) {
    const char* kind = e.code == kExitUsage          ? "usage"
                       : e.code == kExitBudget       ? "budget"
                       : e.code == kExitWriteFailure ? "write-failure"
                       : e.code == kExitInvalidParams ? "invalid-params"
                                                      : "internal";
    std::fprintf(stderr, "rwre: error: %s: %s\n", kind, e.what());
    return e.code;
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "rwre: error: budget: %s\n", e.what());
    return kExitBudget;
  } catch (const LawError& e) {
    std::fprintf(stderr, "rwre: error: invalid-params: %s\n", e.what());
    return kExitInvalidParams;
  } catch (const ordered_json::exception& e) {
    std::fprintf(stderr, "rwre: error: invalid-params: %s\n", e.what());
    return kExitInvalidParams;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "rwre: error: invalid-params: %s\n", e.what());
    return kExitInvalidParams;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rwre: error: internal: %s\n", e.what());
    return kExitInternal;
  }
}
