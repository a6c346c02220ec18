#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "avsim/errors.hpp"
#include "avsim/resilience_policy.hpp"

using namespace avsim;

namespace {

PathPopulation two_paths() {
  PathPopulation p;
  p.delay_s = {1.5e-9, 1.4e-9};
  p.activation = {0.01, 0.01};
  p.bits = 1;
  return p;
}

ResilienceProfile profile(std::string op, std::vector<double> ber, std::vector<double> loss) {
  return {std::move(op), std::move(ber), std::move(loss)};
}

}  // namespace

TEST(BerOfScale, NoViolationAtNominal) {
  const PathPopulation p = PathPopulation::synthetic();
  EXPECT_EQ(ber_of_scale(p, 1.0, 1.6e-9), 0.0);
}

TEST(BerOfScale, SinglePathExample) {
  PathPopulation p;
  p.delay_s = {1.542e-9};
  p.activation = {0.007};
  p.bits = 32;
  EXPECT_NEAR(ber_of_scale(p, 1.05, 1.6e-9), 0.007 / 32.0, 1e-18);
  EXPECT_NEAR(ber_of_scale(p, 1.05, 1.6e-9), 2.19e-4, 0.01e-4);
}

TEST(BerOfScale, LargeScaleGivesPopulationMaximum) {
  const PathPopulation p = PathPopulation::synthetic();
  EXPECT_NEAR(ber_of_scale(p, 100.0, 1.6e-9), p.max_ber(), 1e-15);
  EXPECT_NEAR(p.max_ber(), 100 * 0.0075 / 32.0, 1e-15);
}

TEST(BerOfScale, EmptyPopulationIsDomainError) {
  EXPECT_THROW(ber_of_scale(PathPopulation{}, 1.0, 1.6e-9), DomainError);
}

TEST(BerOfScale, NonDecreasingInScale) {
  const PathPopulation p = PathPopulation::synthetic();
  double prev = 0.0;
  for (double s = 0.9; s < 1.2; s += 0.0005) {
    const double b = ber_of_scale(p, s, 1.6e-9);
    ASSERT_GE(b, prev);
    prev = b;
  }
}

TEST(SyntheticPopulation, DeterministicAndBelowCritical) {
  const PathPopulation a = PathPopulation::synthetic();
  const PathPopulation b = PathPopulation::synthetic();
  EXPECT_EQ(a.delay_s, b.delay_s);
  EXPECT_EQ(a.delay_s.size(), 100u);
  EXPECT_EQ(a.delay_s[0], 1.542e-9);
  EXPECT_EQ(a.max_delay(), 1.542e-9);
  EXPECT_NE(PathPopulation::synthetic(100, 1.542e-9, 15e-12, 0.0075, 32, 1).delay_s, a.delay_s);
}

TEST(TolerableBer, FlatProfileUpToKnee) {
  const auto p = profile("X", {1e-6, 1e-5, 1e-4, 1e-3}, {0.0, 0.0, 0.0, 0.6});
  const TolerableBer t = tolerable_ber(p, 0.005);
  EXPECT_GE(t.ber, 1e-4);
  EXPECT_LT(t.ber, 1.05e-4);
  EXPECT_FALSE(t.at_boundary);
}

TEST(TolerableBer, LargeBudgetIsBoundary) {
  const auto p = profile("X", {1e-6, 1e-5, 1e-4}, {0.0, 0.01, 0.02});
  const TolerableBer t = tolerable_ber(p, 0.5);
  EXPECT_EQ(t.ber, 1e-4);
  EXPECT_TRUE(t.at_boundary);
}

TEST(TolerableBer, ZeroBudgetGivesLowestLossFreeBer) {
  const auto p = profile("X", {1e-6, 1e-5}, {0.0, 0.01});
  EXPECT_EQ(tolerable_ber(p, 0.0).ber, 1e-6);
}

TEST(TolerableBer, EmptyProfileIsDomainError) {
  EXPECT_THROW(tolerable_ber(profile("X", {}, {}), 0.005), DomainError);
  EXPECT_THROW(tolerable_ber(profile("X", {1e-3, 1e-4}, {0.0, 0.1}), 0.005), DomainError);
}

TEST(DelayMax, TwoPathStepFunction) {
  const PathPopulation pop = two_paths();
  // Tolerable BER 0.015 lies between the cumulative levels 0.01 and 0.02.
  const auto prof = profile("X", {1e-3, 0.015, 0.1}, {0.0, 0.005, 0.5});
  const PolicyEntry e = delay_max_for(pop, prof, 0.005, 1.6e-9, 1.5e-9);
  EXPECT_NEAR(e.tolerable_ber, 0.015, 1e-12);
  EXPECT_DOUBLE_EQ(e.scale, 1.6e-9 / 1.4e-9);
  EXPECT_DOUBLE_EQ(e.delay_max, 1.6e-9 / 1.4e-9 * 1.5e-9);
}

TEST(DelayMax, CriticalPathMayNotViolate) {
  const PathPopulation pop = two_paths();
  const auto prof = profile("X", {1e-6, 1e-5}, {0.0, 0.5});
  const PolicyEntry e = delay_max_for(pop, prof, 0.0, 1.6e-9, 1.5e-9);
  EXPECT_EQ(e.delay_max, 1.6e-9);
}

TEST(DelayMax, ToleratingEveryPathIsCapped) {
  const PathPopulation pop = two_paths();
  const auto prof = profile("X", {1e-3, 0.5}, {0.0, 0.001});
  const PolicyEntry e = delay_max_for(pop, prof, 0.005, 1.6e-9, 1.5e-9, 1.5);
  EXPECT_TRUE(e.scale_capped);
  EXPECT_EQ(e.scale, 1.5);
  EXPECT_DOUBLE_EQ(e.delay_max, 1.5 * 1.5e-9);
}

TEST(BuildPolicy, MissingOperatorIsConfigError) {
  auto profiles = default_profiles();
  profiles.pop_back();
  EXPECT_THROW(build_policy(PathPopulation::synthetic(), profiles, 0.005, 1.6e-9, 1.542e-9),
               ConfigError);
}

TEST(BuildPolicy, IdenticalProfilesGiveIdenticalLimits) {
  std::vector<ResilienceProfile> profiles;
  for (const auto& op : kOperators) profiles.push_back(profile(op, {1e-6, 1e-2}, {0.0, 0.01}));
  const PolicyTable t = build_policy(PathPopulation::synthetic(), profiles, 0.005, 1.6e-9, 1.542e-9);
  for (const auto& e : t.entries) EXPECT_EQ(e.delay_max, t.entries[0].delay_max);
}

TEST(BuildPolicy, ZeroBudgetCollapsesToClock) {
  const PolicyTable t =
      build_policy(PathPopulation::synthetic(), default_profiles(), 0.0, 1.6e-9, 1.542e-9);
  for (const auto& e : t.entries) EXPECT_EQ(e.delay_max, 1.6e-9) << e.op;
}

TEST(BuildPolicy, OAndDownAreMostSensitive) {
  const PolicyTable t =
      build_policy(PathPopulation::synthetic(), default_profiles(), 0.005, 1.6e-9, 1.542e-9);
  std::vector<PolicyEntry> sorted = t.entries;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PolicyEntry& a, const PolicyEntry& b) { return a.delay_max < b.delay_max; });
  EXPECT_EQ(sorted[0].op, "O");
  EXPECT_EQ(sorted[1].op, "Down");
}

TEST(PolicyCsv, PopulationAndProfilesRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "avsim_policy_test";
  std::filesystem::create_directories(dir);
  const PathPopulation pop = PathPopulation::synthetic(10);
  {
    std::ofstream f(dir / "paths.csv");
    f << population_csv(pop);
  }
  const PathPopulation back = load_population_csv((dir / "paths.csv").string(), 32);
  ASSERT_EQ(back.delay_s.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(back.delay_s[i], pop.delay_s[i], 1e-24);
  {
    std::ofstream f(dir / "profiles.csv");
    f << profiles_csv(default_profiles());
  }
  const auto profs = load_profiles_csv((dir / "profiles.csv").string());
  ASSERT_EQ(profs.size(), 9u);
  EXPECT_EQ(profs[8].op, "Down");
  EXPECT_EQ(profs[8].loss, default_profiles()[8].loss);
}
