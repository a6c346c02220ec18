#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "avsim/avs_engine.hpp"
#include "avsim/errors.hpp"

using namespace avsim;

namespace {

struct Shared {
  DelaySurrogate model = fit_delay(SyntheticDelayConfig{}.sweep(), 6);
  AgingEvaluator aging{AgingModel::from_params(AgingParams::defaults()), WorkloadStats{},
                       kDefaultHorizon};
};

Shared& shared() {
  static Shared s;
  return s;
}

}  // namespace

TEST(LocateViolation, FindsLinearCrossingWithinTolerance) {
  const double t_star = 1.2345e8;
  auto delay = [&](double t) { return 1.5 + 0.1 * t / t_star; };
  const double t = locate_violation(delay, 1.6, 0.0, 3e8, 3600.0);
  EXPECT_LE(t, t_star);
  EXPECT_GT(t + 3600.0, t_star);
  EXPECT_LE(delay(t), 1.6);
}

TEST(LocateViolation, InvalidBracketIsInternalError) {
  auto delay = [](double t) { return 1.5 + 1e-9 * t; };
  EXPECT_THROW(locate_violation(delay, 10.0, 0.0, 3e8), InternalError);
}

TEST(Simulate, ShortHorizonTakesNoSteps) {
  AvsConfig cfg;
  cfg.horizon = 1.0;
  AgingEvaluator aging(AgingModel::from_params(AgingParams::defaults()), WorkloadStats{}, 1.0);
  const AvsTrajectory t = simulate(cfg, aging, shared().model);
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.v_final(), cfg.v_init);
}

TEST(Simulate, BaselineInvariants) {
  const AvsConfig cfg;
  const AvsTrajectory t = simulate(cfg, shared().aging, shared().model);
  double prev_v = 0.0;
  double prev_t = -1.0;
  for (const auto& c : t.checkpoints) {
    ASSERT_GE(c.v_dd, prev_v);
    ASSERT_GT(c.t, prev_t);
    prev_v = c.v_dd;
    prev_t = c.t;
  }
  EXPECT_EQ(double(t.steps.size()), std::round((t.v_final() - cfg.v_init) / cfg.v_step));
  for (const auto& s : t.steps) {
    EXPECT_LT(s.delay_after_ns, s.delay_before_ns);
    EXPECT_NEAR(s.v_new - s.v_old, cfg.v_step, 1e-12);
  }
  EXPECT_FALSE(t.capped);
  EXPECT_EQ(t.out_of_domain_evals, 0u);
}

TEST(Simulate, BaselineReachesReferenceFinalVoltage) {
  const AvsTrajectory t = simulate(AvsConfig{}, shared().aging, shared().model);
  EXPECT_NEAR(t.v_final(), 1.02, 1e-9);
  EXPECT_EQ(t.steps.size(), 12u);
}

TEST(Simulate, RerunIsByteIdentical) {
  const AvsTrajectory a = simulate(AvsConfig{}, shared().aging, shared().model);
  const AvsTrajectory b = simulate(AvsConfig{}, shared().aging, shared().model);
  EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
  EXPECT_EQ(events_csv(a), events_csv(b));
}

TEST(Simulate, CapIsFlaggedAndRespected) {
  AvsConfig cfg;
  cfg.v_max_cap = 0.95;
  const AvsTrajectory t = simulate(cfg, shared().aging, shared().model);
  EXPECT_TRUE(t.capped);
  EXPECT_LE(t.v_final(), 0.95 + 1e-12);
  EXPECT_NE(events_csv(t).find(",cap,"), std::string::npos);
}

TEST(Simulate, RelaxedThresholdNeverAgesFaster) {
  const AvsTrajectory base = simulate(AvsConfig{}, shared().aging, shared().model);
  AvsConfig relaxed;
  relaxed.delay_threshold = 1.6e-9 * 1.01;
  const AvsTrajectory r = simulate(relaxed, shared().aging, shared().model);
  EXPECT_LT(r.steps.size(), base.steps.size());
  EXPECT_LE(r.final_state().dvth_p, base.final_state().dvth_p);
  EXPECT_LE(r.final_state().dvth_n, base.final_state().dvth_n);
}

TEST(ConstantVoltageAging, RecoveryOnlyLowersBti) {
  const AgingSnapshot a = constant_voltage_aging(shared().aging, 0.9, kDefaultHorizon, false);
  const AgingSnapshot b = constant_voltage_aging(shared().aging, 0.9, kDefaultHorizon, true);
  EXPECT_LT(b.pmos_bti(), a.pmos_bti());
  EXPECT_EQ(b.pmos_hci, a.pmos_hci);
  EXPECT_EQ(b.nmos_hci, a.nmos_hci);
}

TEST(ConstantVoltageAging, FullDutyTrappingEqualsClosedForm) {
  WorkloadStats w;
  w.duty_factor = 1.0;
  const AgingParams p = AgingParams::defaults();
  AgingEvaluator aging(AgingModel::from_params(p), w, kDefaultHorizon);
  const AgingSnapshot s = constant_voltage_aging(aging, 0.9, kDefaultHorizon, false);
  double expect = 0.0;
  for (const auto& sp : p.bti_traps) expect += bti_trapping(sp, 0.9, p.bti_temperature(), kDefaultHorizon);
  EXPECT_NEAR(s.pmos_bti() / expect, 1.0, 1e-9);
}

TEST(CompareScenarios, RowOrdering) {
  const ScenarioReport r = compare_scenarios(AvsConfig{}, shared().aging, shared().model);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_LE(r.rows[1].pmos_total(), r.rows[0].pmos_total());
  EXPECT_LE(r.rows[1].nmos, r.rows[0].nmos);
  EXPECT_LE(r.rows[3].pmos_total(), r.rows[2].pmos_total());
  EXPECT_LE(r.rows[3].nmos, r.rows[2].nmos);
  EXPECT_EQ(r.rows[2].v_dd, r.avs.v_final());
  EXPECT_GT(r.pmos_reduction(), 0.0);
  EXPECT_GT(r.nmos_reduction(), 0.0);
}

TEST(Validation, AvsConfigRejectsBadValues) {
  AvsConfig c;
  c.v_step = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.v_max_cap = 0.8;
  EXPECT_THROW(c.validate(), ConfigError);
}
