#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "avsim/aging_models.hpp"
#include "avsim/errors.hpp"

using namespace avsim;

namespace {

constexpr double kT = 298.15;

TrapSpecies plain_species(double r_perm = 0.0) {
  TrapSpecies s;
  s.name = "s";
  s.A_c = 1e-3;
  s.B_c = 2.0;
  s.E_ac = 0.0;
  s.n_c = 0.2;
  s.A_e = 10.0;
  s.B_e = 1.0;
  s.E_ae = 0.0;
  s.beta_e = 0.5;
  s.r_perm = r_perm;
  return s;
}

}  // namespace

TEST(BtiTrapping, ZeroTimeGivesZero) {
  EXPECT_EQ(bti_trapping(AgingParams::defaults().bti_traps[0], 0.9, kT, 0.0), 0.0);
}

TEST(BtiTrapping, RejectsNegativeTimeAndNonFiniteInput) {
  const TrapSpecies s = plain_species();
  EXPECT_THROW(bti_trapping(s, 0.9, kT, -1.0), DomainError);
  EXPECT_THROW(bti_trapping(s, std::nan(""), kT, 1.0), DomainError);
  EXPECT_THROW(bti_trapping(s, 0.9, kT, std::numeric_limits<double>::infinity()), DomainError);
}

TEST(BtiTrapping, MatchesClosedForm) {
  TrapSpecies s = plain_species();
  s.E_ac = 0.1;
  const double expect =
      1e-3 * std::exp(2.0 * 0.95) * std::exp(-0.1 / (kBoltzmannEv * 350.0)) * std::pow(500.0, 0.2);
  EXPECT_NEAR(bti_trapping(s, 0.95, 350.0, 500.0), expect, 1e-15);
}

TEST(BtiTrapping, MonotoneInTimeVoltageAndTemperature) {
  TrapSpecies s = plain_species();
  s.E_ac = 0.1;
  EXPECT_LT(bti_trapping(s, 0.9, kT, 10.0), bti_trapping(s, 0.9, kT, 11.0));
  EXPECT_LT(bti_trapping(s, 0.9, kT, 10.0), bti_trapping(s, 0.91, kT, 10.0));
  EXPECT_LT(bti_trapping(s, 0.9, kT, 10.0), bti_trapping(s, 0.9, kT + 10.0, 10.0));
}

TEST(BtiDetrapping, ZeroTimeIsIdentity) {
  EXPECT_DOUBLE_EQ(bti_detrapping(plain_species(), 10e-3, 0.0, kT, 0.0), 10e-3);
}

TEST(BtiDetrapping, ZeroShiftStaysZero) {
  EXPECT_EQ(bti_detrapping(plain_species(), 0.0, 0.0, kT, 1e6), 0.0);
}

TEST(BtiDetrapping, ApproachesPermanentFraction) {
  EXPECT_NEAR(bti_detrapping(plain_species(0.3), 10e-3, 0.0, kT, 1e12), 3e-3, 1e-12);
}

TEST(BtiDetrapping, RejectsNegativeShift) {
  EXPECT_THROW(bti_detrapping(plain_species(), -1e-3, 0.0, kT, 1.0), DomainError);
}

TEST(BtiDetrapping, HigherRecoveryVoltageSlowsEmission) {
  const TrapSpecies s = plain_species();
  EXPECT_GT(bti_detrapping(s, 10e-3, 0.5, kT, 1.0), bti_detrapping(s, 10e-3, 0.0, kT, 1.0));
}

TEST(HciLaw, ZeroTimeGivesZero) {
  EXPECT_EQ(hci_law(AgingParams::defaults().hci_nmos, 0.9, kT, 0.0), 0.0);
}

TEST(HciLaw, MatchesClosedForm) {
  const HciParams p{2e-3, 3.0, 0.0, 0.45};
  EXPECT_NEAR(hci_law(p, 1.0, kT, 1e4), 2e-3 * std::exp(3.0) * std::pow(1e4, 0.45), 1e-15);
}

TEST(EquivalentTime, ZeroShiftGivesZero) {
  const PowerLaw law(1e-3, 0.0, 0.0, 0.2);
  EXPECT_EQ(equivalent_time(law, 0.0, 0.9, kT), 0.0);
}

TEST(EquivalentTime, RoundTripsTheLaw) {
  const PowerLaw law = PowerLaw::capture(plain_species());
  const double dv = law(0.9, kT, 1000.0);
  EXPECT_NEAR(equivalent_time(law, dv, 0.9, kT), 1000.0, 1e-9);
}

TEST(EquivalentTime, PowerLawInversionExample) {
  const PowerLaw law(1e-3, 0.0, 0.0, 0.2);
  const double t = equivalent_time(law, 2e-3, 0.9, kT);
  EXPECT_NEAR(t, std::pow(2.0, 1.0 / 0.2), 1e-12);
  EXPECT_NEAR(law(0.9, kT, t), 2e-3, 1e-15);
}

TEST(EquivalentTime, BisectionDefaultAgreesWithClosedForm) {
  struct Wrapped final : StressLaw {
    PowerLaw inner{1e-3, 2.0, 0.0, 0.25};
    double operator()(double v, double T, double t) const override { return inner(v, T, t); }
  } wrapped;
  const double dv = wrapped(0.9, kT, 12345.0);
  EXPECT_NEAR(equivalent_time(wrapped, dv, 0.9, kT) / 12345.0, 1.0, 1e-8);
}

TEST(EquivalentTime, UnreachableShiftIsContinuationError) {
  struct Saturating final : StressLaw {
    double operator()(double, double, double t) const override { return 1e-3 * t / (1.0 + t); }
  } law;
  EXPECT_THROW(equivalent_time(law, 2e-3, 0.9, kT), ContinuationError);
  const PowerLaw zero(0.0, 0.0, 0.0, 0.2);
  EXPECT_THROW(equivalent_time(zero, 1e-3, 0.9, kT), ContinuationError);
}

TEST(ApplyStressSegment, ZeroDurationLeavesStateUnchanged) {
  const AgingModel m = AgingModel::from_params(AgingParams::defaults());
  DeviceAgingState s = apply_stress_segment(m, DeviceAgingState::fresh(2), 0.9, 100.0,
                                            SegmentMode::Stress);
  const DeviceAgingState same = apply_stress_segment(m, s, 1.0, 0.0, SegmentMode::Recovery);
  EXPECT_EQ(same.bti, s.bti);
  EXPECT_EQ(same.bti_eq_time, s.bti_eq_time);
}

TEST(ApplyStressSegment, ContinuationAtSameVoltageEqualsOneLongSegment) {
  AgingParams p;
  p.bti_traps = {plain_species()};
  p.hci_pmos = {1e-3, 1.0, 0.0, 0.3};
  p.hci_nmos = p.hci_pmos;
  const AgingModel m = AgingModel::from_params(p);
  DeviceAgingState s = DeviceAgingState::fresh(1);
  s = apply_stress_segment(m, s, 0.9, 300.0, SegmentMode::Stress);
  s = apply_stress_segment(m, s, 0.9, 700.0, SegmentMode::Stress);
  EXPECT_NEAR(s.bti[0], bti_trapping(p.bti_traps[0], 0.9, kT, 1000.0), 1e-15);
}

TEST(ApplyStressSegment, VoltageChangeUsesEquivalentTime) {
  AgingParams p;
  p.bti_traps = {plain_species()};
  p.hci_pmos = {1e-3, 1.0, 0.0, 0.3};
  p.hci_nmos = p.hci_pmos;
  const AgingModel m = AgingModel::from_params(p);
  DeviceAgingState s = apply_stress_segment(m, DeviceAgingState::fresh(1), 0.9, 1000.0,
                                            SegmentMode::Stress);
  s = apply_stress_segment(m, s, 1.0, 500.0, SegmentMode::Stress);
  // K(V)·t^n continued: (dv/K(1.0))^(1/n) + 500 at the new voltage.
  const TrapSpecies& sp = p.bti_traps[0];
  const double k9 = sp.A_c * std::exp(sp.B_c * 0.9);
  const double k10 = sp.A_c * std::exp(sp.B_c * 1.0);
  const double dv9 = k9 * std::pow(1000.0, sp.n_c);
  const double expect = k10 * std::pow(std::pow(dv9 / k10, 1.0 / sp.n_c) + 500.0, sp.n_c);
  EXPECT_NEAR(s.bti[0], expect, 1e-12 * expect);
}

TEST(ApplyStressSegment, RecoveryContinuesWithinOnePhase) {
  AgingParams p;
  p.bti_traps = {plain_species(0.2)};
  p.hci_pmos = {1e-3, 1.0, 0.0, 0.3};
  p.hci_nmos = p.hci_pmos;
  const AgingModel m = AgingModel::from_params(p);
  DeviceAgingState s = apply_stress_segment(m, DeviceAgingState::fresh(1), 0.9, 1000.0,
                                            SegmentMode::Stress);
  const double peak = s.bti[0];
  DeviceAgingState a = apply_stress_segment(m, s, 0.0, 0.03, SegmentMode::Recovery);
  a = apply_stress_segment(m, a, 0.0, 0.07, SegmentMode::Recovery);
  EXPECT_NEAR(a.bti[0], bti_detrapping(p.bti_traps[0], peak, 0.0, kT, 0.1), 1e-12 * peak);
}

TEST(AgingParams, DefaultsValidateAndNameSpecies) {
  const AgingParams p = AgingParams::defaults();
  EXPECT_NO_THROW(p.validate());
  ASSERT_EQ(p.bti_traps.size(), 2u);
  EXPECT_EQ(p.bti_traps[0].name, "fast");
  EXPECT_EQ(p.bti_traps[1].name, "slow");
}

TEST(AgingParams, ValidationRejectsOutOfRangeExponents) {
  AgingParams p = AgingParams::defaults();
  p.bti_traps[0].n_c = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = AgingParams::defaults();
  p.bti_traps[1].r_perm = -0.1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = AgingParams::defaults();
  p.hci_nmos.n_h = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(AgingModelProperty, StressSegmentsAreMonotone) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    TrapSpecies s = plain_species(u(rng));
    s.A_c = 1e-4 * std::exp(4.0 * u(rng));
    s.B_c = 5.0 * u(rng);
    s.n_c = 0.05 + 0.5 * u(rng);
    AgingParams p;
    p.bti_traps = {s};
    p.hci_pmos = {1e-3, 1.0, 0.0, 0.3};
    p.hci_nmos = p.hci_pmos;
    const AgingModel m = AgingModel::from_params(p);
    DeviceAgingState st = DeviceAgingState::fresh(1);
    double prev = 0.0;
    for (int i = 0; i < 5; ++i) {
      st = apply_stress_segment(m, st, 0.8 + 0.05 * i, 10.0 + 100.0 * u(rng), SegmentMode::Stress);
      ASSERT_GE(st.bti[0], prev);
      prev = st.bti[0];
    }
    st = apply_stress_segment(m, st, 0.0, 1.0, SegmentMode::Recovery);
    ASSERT_LE(st.bti[0], prev);
    ASSERT_GE(st.bti[0], s.r_perm * prev * (1.0 - 1e-12));
  }
}
