#pragma once

#include <cstdint>
#include <vector>

#include "qclif/error.hpp"
#include "qclif/fixedpoint.hpp"

namespace qclif::clif {

// Exponential-decay two-compartment neuron. Time constants are in units of
// the step dt.
struct ClifParams {
  double tau_a = 20.0;
  double tau_m = 200.0;
  double r_m = 1.0;
  double v_th = 1.0;
  double dt = 1.0;
  // Subtract v_th inside every somatic update, as the update equation is
  // literally written. Off by default: threshold is only a spike comparison.
  bool subtract_vth_mode = false;

  double alpha() const;
  double beta() const;
  void validate() const;
};

struct ClifState {
  double v_apical = 0.0;
  double v_somatic = 0.0;
  bool last_spike = false;
};

// alpha * v_apical + (1 - alpha) * r_m * i_apical
double clif_apical_step(const ClifState &state, const ClifParams &params,
                        double i_apical);

struct ClifSomaticResult {
  double v = 0.0;
  bool spike = false;
};

// v = beta * v_somatic + (1 - beta) * r_m * i_somatic * relu(v_apical_new)
//     [- v_th in subtract mode]; spikes when v >= v_th and then resets to 0.
ClifSomaticResult clif_somatic_step(const ClifState &state,
                                    const ClifParams &params,
                                    double i_somatic, double v_apical_new);

// Full update: apical first, then somatic using the new apical value.
ClifState clif_step(const ClifState &state, const ClifParams &params,
                    double i_apical, double i_somatic);

struct DivergenceStep {
  std::uint64_t t = 0;
  double exponential = 0.0;
  double linear = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0; // relative to the exponential curve; 0 when both are 0
};

struct DivergenceReport {
  std::vector<DivergenceStep> steps; // t = 0 .. steps inclusive
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
};

// Exponential decay v0 * exp(-t / tau) against the linear-leak trajectory
// max(0, v0 - t * leak * scale) on the grid t = 0..steps.
DivergenceReport compare_leak_models(double v0, double tau, std::int64_t leak,
                                     std::uint64_t steps,
                                     const Rational &scale);

// Integer leak (in units of `scale`) whose slope matches the initial slope of
// the exponential, v0 * (1 - exp(-1/tau)), rounded to nearest.
std::int64_t tangent_matched_leak(double v0, double tau, const Rational &scale);

} // namespace qclif::clif
