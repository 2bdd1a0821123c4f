#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/philox.hpp"

namespace rwre {

class LawError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class LawKind { two_point, uniform };

struct AxisParams {
  double alpha = 1.0;
  double beta = 1.0;
  double prob_alpha = 1.0;  // two_point only
};

// Marginal law of a single edge conductance. Per-axis parameter overrides are
// supported (direction-dependent marginals); the default is isotropic.
class ConductanceLaw {
 public:
  static ConductanceLaw two_point(double alpha, double beta, double prob_alpha) {
    ConductanceLaw law;
    law.kind_ = LawKind::two_point;
    law.base_ = AxisParams{alpha, beta, prob_alpha};
    law.validate();
    return law;
  }

  static ConductanceLaw uniform(double alpha, double beta) {
    ConductanceLaw law;
    law.kind_ = LawKind::uniform;
    law.base_ = AxisParams{alpha, beta, 0.0};
    law.validate();
    return law;
  }

  static ConductanceLaw constant(double c) { return two_point(c, c, 1.0); }

  // "two_point:1,4,0.5" | "uniform:1,3" | "constant:2"
  static ConductanceLaw parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw LawError("law must be kind:params, got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    std::vector<double> params;
    std::size_t pos = colon + 1;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        params.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw LawError("bad numeric law parameter '" + tok + "'");
      } catch (const LawError&) {
        throw;
      } catch (const std::exception&) {
        throw LawError("bad numeric law parameter '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (kind == "two_point") {
      if (params.size() != 3) throw LawError("two_point takes alpha,beta,prob_alpha");
      return two_point(params[0], params[1], params[2]);
    }
    if (kind == "uniform") {
      if (params.size() != 2) throw LawError("uniform takes alpha,beta");
      return uniform(params[0], params[1]);
    }
    if (kind == "constant") {
      if (params.size() != 1) throw LawError("constant takes a single value");
      return constant(params[0]);
    }
    throw LawError("unknown law kind '" + kind + "'");
  }

  void set_axis_params(int axis, const AxisParams& p) {
    if (axis < 0 || axis >= kMaxDim) throw LawError("axis out of range for per-axis law parameters");
    if (per_axis_.size() <= static_cast<std::size_t>(axis)) per_axis_.resize(static_cast<std::size_t>(axis) + 1, base_);
    per_axis_[static_cast<std::size_t>(axis)] = p;
    validate();
  }

  LawKind kind() const { return kind_; }

  const AxisParams& axis_params(int axis) const {
    if (static_cast<std::size_t>(axis) < per_axis_.size()) return per_axis_[static_cast<std::size_t>(axis)];
    return base_;
  }

  bool has_axis_overrides() const { return !per_axis_.empty(); }

  double sample(std::uint64_t raw, int axis) const {
    const AxisParams& p = axis_params(axis);
    if (kind_ == LawKind::two_point) {
      if (p.prob_alpha >= 1.0) return p.alpha;
      if (p.prob_alpha <= 0.0) return p.beta;
      const auto threshold = static_cast<std::uint64_t>(std::ldexp(p.prob_alpha, 64));
      return raw < threshold ? p.alpha : p.beta;
    }
    return p.alpha + (p.beta - p.alpha) * to_unit_interval(raw);
  }

  double mean_edge(int axis) const {
    const AxisParams& p = axis_params(axis);
    if (kind_ == LawKind::two_point) return p.prob_alpha * p.alpha + (1.0 - p.prob_alpha) * p.beta;
    return 0.5 * (p.alpha + p.beta);
  }

  double var_edge(int axis) const {
    const AxisParams& p = axis_params(axis);
    if (kind_ == LawKind::two_point) {
      const double gap = p.beta - p.alpha;
      return p.prob_alpha * (1.0 - p.prob_alpha) * gap * gap;
    }
    const double gap = p.beta - p.alpha;
    return gap * gap / 12.0;
  }

  double min_value() const {
    double m = base_.alpha;
    for (const auto& p : per_axis_) m = std::fmin(m, p.alpha);
    return m;
  }

  double max_value() const {
    double m = base_.beta;
    for (const auto& p : per_axis_) m = std::fmax(m, p.beta);
    return m;
  }

  bool is_constant() const {
    auto axis_constant = [this](const AxisParams& p) {
      if (p.alpha == p.beta) return true;
      return kind_ == LawKind::two_point && (p.prob_alpha >= 1.0 || p.prob_alpha <= 0.0);
    };
    if (!axis_constant(base_)) return false;
    for (const auto& p : per_axis_)
      if (!axis_constant(p)) return false;
    return true;
  }

  double constant_value() const {
    const AxisParams& p = base_;
    if (kind_ == LawKind::two_point && p.prob_alpha <= 0.0) return p.beta;
    return p.alpha;
  }

  std::string label() const {
    char buf[128];
    const AxisParams& p = base_;
    if (kind_ == LawKind::two_point)
      std::snprintf(buf, sizeof buf, "two_point:%.17g,%.17g,%.17g", p.alpha, p.beta, p.prob_alpha);
    else
      std::snprintf(buf, sizeof buf, "uniform:%.17g,%.17g", p.alpha, p.beta);
    return buf;
  }

 private:
  void validate() const {
    auto check = [this](const AxisParams& p) {
      if (!(p.alpha > 0) || !(p.beta >= p.alpha) || !std::isfinite(p.beta))
        throw LawError("law requires 0 < alpha <= beta");
      if (kind_ == LawKind::two_point && !(p.prob_alpha >= 0.0 && p.prob_alpha <= 1.0))
        throw LawError("two_point prob_alpha must lie in [0,1]");
    };
    check(base_);
    for (const auto& p : per_axis_) check(p);
  }

  LawKind kind_ = LawKind::two_point;
  AxisParams base_{};
  std::vector<AxisParams> per_axis_;
};

}  // namespace rwre
