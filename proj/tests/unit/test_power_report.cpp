#include <gtest/gtest.h>

#include <cmath>

#include "avsim/errors.hpp"
#include "avsim/power_report.hpp"
#include "avsim/resilience_policy.hpp"

using namespace avsim;

namespace {

AvsTrajectory flat(double v, double horizon = 100.0) {
  AvsTrajectory t;
  t.epochs = {{v, 0.0, horizon}};
  t.checkpoints = {{horizon, v, 1.5, 0.05, 0.04, 0.04, 0.01}};
  t.v_init = v;
  t.v_step = 0.01;
  return t;
}

}  // namespace

TEST(EffectiveVoltage, ConstantSupply) {
  EXPECT_NEAR(effective_voltage(flat(0.9)), 0.9, 1e-15);
}

TEST(EffectiveVoltage, TwoEqualEpochs) {
  const std::vector<Epoch> e{{0.90, 0.0, 1.0}, {1.02, 1.0, 2.0}};
  EXPECT_NEAR(effective_voltage(e), std::sqrt((0.81 + 1.0404) / 2.0), 1e-15);
  EXPECT_NEAR(effective_voltage(e), 0.9620, 2e-4);
}

TEST(EffectiveVoltage, ZeroDurationIsDomainError) {
  EXPECT_THROW(effective_voltage(std::vector<Epoch>{}), DomainError);
  EXPECT_THROW(effective_voltage(std::vector<Epoch>{{0.9, 1.0, 1.0}}), DomainError);
}

TEST(LifetimePower, QuadraticReference) {
  const PowerModel pm;
  EXPECT_NEAR(lifetime_power(pm, 0.90), 0.85, 1e-15);
  EXPECT_NEAR(lifetime_power(pm, 0.99), 0.85 * std::pow(0.99 / 0.9, 2), 1e-15);
  EXPECT_NEAR(lifetime_power(pm, 0.99), 1.03, 0.005);
  EXPECT_NEAR(lifetime_power(pm, 0.92), 0.88, 0.01);
  EXPECT_NEAR(lifetime_power(pm, 0.97), 0.85 * std::pow(0.97 / 0.9, 2), 1e-15);
}

TEST(LifetimePower, LeakageTermIsLinear) {
  PowerModel pm;
  pm.leakage_fraction = 0.1;
  EXPECT_NEAR(lifetime_power(pm, 0.99), 0.85 * (std::pow(1.1, 2) + 0.1 * 1.1), 1e-14);
}

TEST(SavingsReport, IdenticalTrajectoriesSaveNothing) {
  std::map<std::string, AvsTrajectory> ops;
  for (const auto& op : kOperators) ops[op] = flat(1.0);
  const SavingsReport r = savings_report(ops, flat(1.0), PowerModel{});
  ASSERT_EQ(r.rows.size(), 9u);
  for (const auto& row : r.rows) EXPECT_EQ(row.saving, 0.0);
  EXPECT_EQ(r.average_saving, 0.0);
}

TEST(SavingsReport, AveragesOperatorSavings) {
  std::map<std::string, AvsTrajectory> ops;
  for (const auto& op : kOperators) ops[op] = flat(0.9);
  ops["O"] = flat(0.99);
  const SavingsReport r = savings_report(ops, flat(0.99), PowerModel{});
  const double s = 1.0 - std::pow(0.9 / 0.99, 2);
  EXPECT_NEAR(r.average_saving, 8.0 * s / 9.0, 1e-14);
  EXPECT_EQ(r.rows[5].component, "O");
  EXPECT_EQ(r.rows[5].saving, 0.0);
}

TEST(SavingsReport, MissingOperatorIsConfigError) {
  std::map<std::string, AvsTrajectory> ops;
  ops["Q"] = flat(0.9);
  EXPECT_THROW(savings_report(ops, flat(1.0), PowerModel{}), ConfigError);
}
