#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "qclif/clif.hpp"

using namespace qclif;
using namespace qclif::clif;

TEST(ClifParams, DecayConstants) {
  ClifParams p;
  EXPECT_DOUBLE_EQ(p.alpha(), 0.951229424500714);
  EXPECT_NEAR(p.beta(), 0.9950124791926823, 1e-15);
  p.tau_a = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Clif, ApicalContractsWithoutInput) {
  ClifParams p;
  ClifState s{5.0, 0.0, false};
  for (int t = 0; t < 100; ++t) {
    const double next = clif_apical_step(s, p, 0.0);
    EXPECT_LT(std::abs(next), std::abs(s.v_apical));
    s.v_apical = next;
  }
}

TEST(Clif, ApicalSteadyState) {
  ClifParams p;
  p.r_m = 2.5;
  ClifState s;
  for (int t = 0; t < 50 * 20; ++t)
    s.v_apical = clif_apical_step(s, p, 0.4);
  EXPECT_NEAR(s.v_apical, 1.0, 1e-9);
}

TEST(Clif, ApicalMatchesClosedForm) {
  // v_t = a^t v0 + (1 - a^t) r I for constant input.
  ClifParams p;
  p.tau_a = 7.0;
  p.r_m = 0.8;
  const double v0 = 3.0, input = -1.25;
  ClifState s{v0, 0.0, false};
  for (int t = 1; t <= 200; ++t) {
    s.v_apical = clif_apical_step(s, p, input);
    const double at = std::exp(-t / 7.0);
    EXPECT_NEAR(s.v_apical, at * v0 + (1.0 - at) * 0.8 * input, 1e-12) << t;
  }
}

TEST(Clif, ApicalLinearInStateAndInput) {
  ClifParams p;
  for (double k : {0.5, 2.0, 10.0}) {
    const double a = clif_apical_step({1.5, 0, false}, p, 0.3);
    const double b = clif_apical_step({1.5 * k, 0, false}, p, 0.3 * k);
    EXPECT_NEAR(b, k * a, 1e-12);
  }
}

TEST(Clif, SomaticGateAndReset) {
  ClifParams p;
  p.tau_m = 1.0 / std::log(2.0); // beta = 1/2
  ClifState s{0.0, 0.4, false};
  // Negative apical potential closes the gate.
  EXPECT_NEAR(clif_somatic_step(s, p, 10.0, -3.0).v, 0.2, 1e-12);
  // 0.5 * 0.4 + 0.5 * 0.5 * 1 = 0.45
  const auto r = clif_somatic_step(s, p, 0.5, 1.0);
  EXPECT_NEAR(r.v, 0.45, 1e-12);
  EXPECT_FALSE(r.spike);
  const auto f = clif_somatic_step(s, p, 4.0, 1.0);
  EXPECT_TRUE(f.spike);
  EXPECT_EQ(f.v, 0.0);
  p.subtract_vth_mode = true;
  EXPECT_NEAR(clif_somatic_step(s, p, 0.5, 1.0).v, -0.55, 1e-12);
}

TEST(Clif, RejectsNonFinite) {
  ClifParams p;
  EXPECT_THROW(clif_apical_step({}, p, std::nan("")), NonFiniteInput);
  EXPECT_THROW(
      clif_somatic_step({}, p, std::numeric_limits<double>::infinity(), 1.0),
      NonFiniteInput);
}

TEST(Clif, StepUsesNewApicalValue) {
  ClifParams p;
  const ClifState s{0.0, 0.0, false};
  const auto n = clif_step(s, p, 1.0, 1.0);
  const double ap = 1.0 - p.alpha();
  EXPECT_DOUBLE_EQ(n.v_apical, ap);
  EXPECT_DOUBLE_EQ(n.v_somatic, (1.0 - p.beta()) * ap);
}

TEST(LeakComparison, TangentMatchedLeakAtTauTwenty) {
  const Rational scale(1, 1000000);
  const auto leak = tangent_matched_leak(1.0, 20.0, scale);
  EXPECT_EQ(leak, 48771); // 1e6 * (1 - exp(-1/20)) = 48770.58
  const auto rep = compare_leak_models(1.0, 20.0, leak, 10, scale);
  ASSERT_EQ(rep.steps.size(), 11u);
  EXPECT_EQ(rep.steps[0].abs_error, 0.0);
  EXPECT_NEAR(rep.steps[1].rel_error, 4.4627e-07, 1e-10);
  EXPECT_NEAR(rep.steps[10].linear, 0.51229, 1e-12);
  EXPECT_NEAR(rep.steps[10].exponential, 0.6065306597126334, 1e-15);
  EXPECT_NEAR(rep.max_rel_error, 0.1553765802330313, 1e-12);
  // Error grows monotonically away from the tangent point.
  for (std::size_t t = 2; t < rep.steps.size(); ++t)
    EXPECT_GT(rep.steps[t].rel_error, rep.steps[t - 1].rel_error);
}

TEST(LeakComparison, LinearTrajectoryFloorsAtZero) {
  const auto rep = compare_leak_models(1.0, 5.0, 300, 10, Rational(1, 1000));
  EXPECT_EQ(rep.steps[4].linear, 0.0);
  EXPECT_DOUBLE_EQ(rep.steps[3].linear, 0.1);
  EXPECT_THROW(compare_leak_models(1.0, 0.0, 1, 10, Rational(1)), ConfigError);
}
