#include "qclif/clif.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qclif::clif {

namespace {

void require_finite(double v, const char *what) {
  if (!std::isfinite(v))
    throw NonFiniteInput(what);
}

} // namespace

double ClifParams::alpha() const { return std::exp(-dt / tau_a); }
double ClifParams::beta() const { return std::exp(-dt / tau_m); }

void ClifParams::validate() const {
  for (double v : {tau_a, tau_m, r_m, v_th, dt})
    require_finite(v, "CLIF parameter");
  if (!(tau_a > 0.0) || !(tau_m > 0.0) || !(dt > 0.0))
    throw ConfigError("CLIF time constants and dt must be positive");
}

double clif_apical_step(const ClifState &state, const ClifParams &params,
                        double i_apical) {
  params.validate();
  require_finite(state.v_apical, "apical potential");
  require_finite(i_apical, "apical current");
  const double a = params.alpha();
  return a * state.v_apical + (1.0 - a) * params.r_m * i_apical;
}

ClifSomaticResult clif_somatic_step(const ClifState &state,
                                    const ClifParams &params, double i_somatic,
                                    double v_apical_new) {
  params.validate();
  require_finite(state.v_somatic, "somatic potential");
  require_finite(i_somatic, "somatic current");
  require_finite(v_apical_new, "apical potential");
  const double b = params.beta();
  const double gate = std::max(0.0, v_apical_new);
  double v = b * state.v_somatic + (1.0 - b) * (params.r_m * i_somatic * gate);
  if (params.subtract_vth_mode)
    v -= params.v_th;
  if (v >= params.v_th)
    return {0.0, true};
  return {v, false};
}

ClifState clif_step(const ClifState &state, const ClifParams &params,
                    double i_apical, double i_somatic) {
  ClifState next;
  next.v_apical = clif_apical_step(state, params, i_apical);
  const auto s = clif_somatic_step(state, params, i_somatic, next.v_apical);
  next.v_somatic = s.v;
  next.last_spike = s.spike;
  return next;
}

DivergenceReport compare_leak_models(double v0, double tau, std::int64_t leak,
                                     std::uint64_t steps,
                                     const Rational &scale) {
  require_finite(v0, "initial potential");
  require_finite(tau, "time constant");
  if (v0 < 0.0 || !(tau > 0.0) || steps < 1 || leak < 0)
    throw ConfigError("compare_leak_models needs v0 >= 0, tau > 0, "
                      "leak >= 0 and steps >= 1");
  DivergenceReport rep;
  rep.steps.reserve(steps + 1);
  for (std::uint64_t t = 0; t <= steps; ++t) {
    DivergenceStep s;
    s.t = t;
    s.exponential = v0 * std::exp(-static_cast<double>(t) / tau);
    // leak * t * scale in exact rational arithmetic, then one rounding.
    const Rational drop = Rational(leak * static_cast<std::int64_t>(t)) * scale;
    s.linear = std::max(0.0, v0 - drop.to_double());
    s.abs_error = std::abs(s.linear - s.exponential);
    s.rel_error = s.exponential > 0.0 ? s.abs_error / s.exponential : 0.0;
    rep.max_abs_error = std::max(rep.max_abs_error, s.abs_error);
    rep.max_rel_error = std::max(rep.max_rel_error, s.rel_error);
    rep.steps.push_back(s);
  }
  return rep;
}

std::int64_t tangent_matched_leak(double v0, double tau,
                                  const Rational &scale) {
  const double slope = v0 * (1.0 - std::exp(-1.0 / tau));
  return static_cast<std::int64_t>(std::llround(slope / scale.to_double()));
}

} // namespace qclif::clif
