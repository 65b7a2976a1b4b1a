#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "snra/device.hpp"
#include "test_support.hpp"

using namespace snra;

TEST(PBit, SymmetryPoint) { EXPECT_DOUBLE_EQ(PBit().probability(0.0), 0.5); }

TEST(PBit, OppositeInputsSumToOne) {
  const PBit p;
  EXPECT_NEAR(p.probability(1.7) + p.probability(-1.7), 1.0, 1e-15);
}

TEST(PBit, LogThreeGivesThreeQuarters) {
  // 1 / (1 + e^{-ln 3}) = 1 / (1 + 1/3) = 3/4
  EXPECT_NEAR(PBit().probability(std::log(3.0)), 0.75, 1e-15);
}

TEST(PBit, InputScaleMultipliesNetInput) {
  EXPECT_NEAR(PBit(2.0).probability(0.5 * std::log(3.0)), 0.75, 1e-15);
}

TEST(PBit, RejectsNonFiniteInput) {
  const PBit p;
  EXPECT_THROW(p.probability(std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(p.probability(std::numeric_limits<double>::infinity()), DomainError);
  RandomStream rng(1);
  EXPECT_THROW(p.sample(-std::numeric_limits<double>::infinity(), rng), DomainError);
}

TEST(PBit, StrictlyIncreasing) {
  const PBit p;
  double prev = p.probability(-30.0);
  for (double x = -29.9; x <= 30.0; x += 0.1) {
    const double cur = p.probability(x);
    ASSERT_LT(prev, cur) << "x=" << x;
    prev = cur;
  }
}

TEST(PBit, SaturatedSamplesAreDeterministic) {
  const PBit p;
  RandomStream rng(3);
  for (int k = 0; k < 1000; ++k) {
    ASSERT_TRUE(p.sample(1e9, rng));
    ASSERT_FALSE(p.sample(-1e9, rng));
  }
}

TEST(PBit, SampleConsumesOneDraw) {
  RandomStream rng(9);
  PBit().sample(0.3, rng);
  EXPECT_EQ(rng.draws(), 1U);
}

TEST(PBit, EmpiricalMeanAtZero) {
  const PBit p;
  RandomStream rng(2024);
  const int n = 1'000'000;
  int ones = 0;
  for (int k = 0; k < n; ++k) ones += p.sample(0.0, rng);
  EXPECT_NEAR(double(ones) / n, 0.5, 0.002);
}

TEST(PBit, EmpiricalMeanWithinThreeSigma) {
  const PBit p;
  for (double x : {-2.0, -0.4, 0.9, 3.1}) {
    RandomStream rng(static_cast<std::uint64_t>(1000 * (x + 10)));
    const int n = 1'000'000;
    int ones = 0;
    for (int k = 0; k < n; ++k) ones += p.sample(x, rng);
    const double q = p.probability(x);
    EXPECT_NEAR(double(ones) / n, q, test::binomial_band(q, n)) << "x=" << x;
  }
}

TEST(PBit, SameSeedSameSequence) {
  const PBit p;
  RandomStream a(77), b(77);
  for (int k = 0; k < 10000; ++k) ASSERT_EQ(p.sample(0.2, a), p.sample(0.2, b));
}

TEST(SynapseGrid, WeightMappingEndpoints) {
  SynapseGrid g(2, 2);
  EXPECT_EQ(g.weight_of(0), -1.0);
  EXPECT_EQ(g.weight_of(31), 1.0);
  EXPECT_NEAR(g.weight_of(10), -1.0 + 10 * 2.0 / 31.0, 1e-15);
  EXPECT_NEAR(g.learning_rate(), 2.0 / 31.0, 1e-15);
}

TEST(SynapseGrid, OddLevelCountHasExactZero) {
  SynapseGrid g(1, 1, SynapseConfig{33, 1, -1.0, 1.0});
  EXPECT_EQ(g.midpoint(), 16);
  EXPECT_EQ(g.weight_of(16), 0.0);
}

TEST(SynapseGrid, SinglePulseSteps) {
  SynapseGrid g(3, 2);
  g.set_state(1, 1, 5);
  EXPECT_EQ(g.apply_pulse(1, 1, PulseDirection::Increase), 6);
  EXPECT_EQ(g.apply_pulse(1, 1, PulseDirection::None), 6);
  EXPECT_EQ(g.apply_pulse(1, 1, PulseDirection::Decrease), 5);
}

TEST(SynapseGrid, Saturates) {
  SynapseGrid g(1, 1);
  g.set_state(0, 0, 31);
  EXPECT_EQ(g.apply_pulse(0, 0, PulseDirection::Increase), 31);
  g.set_state(0, 0, 0);
  EXPECT_EQ(g.apply_pulse(0, 0, PulseDirection::Decrease), 0);

  SynapseGrid wide(1, 1, SynapseConfig{32, 4, -1.0, 1.0});
  wide.set_state(0, 0, 29);
  EXPECT_EQ(wide.apply_pulse(0, 0, PulseDirection::Increase), 31);
  wide.set_state(0, 0, 2);
  EXPECT_EQ(wide.apply_pulse(0, 0, PulseDirection::Decrease), 0);
}

TEST(SynapseGrid, OutOfRangeCell) {
  SynapseGrid g(2, 3);
  EXPECT_THROW(g.apply_pulse(2, 0, PulseDirection::Increase), IndexError);
  EXPECT_THROW(g.apply_pulse(0, 3, PulseDirection::Increase), IndexError);
  EXPECT_THROW(g.set_state(0, 0, 32), IndexError);
}

TEST(SynapseGrid, IncreaseThenDecreaseRoundTrip) {
  for (std::uint16_t q : {3, 8, 32, 100}) {
    SynapseGrid g(1, 1, SynapseConfig{q, 1, -1.0, 1.0});
    for (std::uint16_t d = 1; d + 1 < q; ++d) {
      g.set_state(0, 0, d);
      g.apply_pulse(0, 0, PulseDirection::Increase);
      g.apply_pulse(0, 0, PulseDirection::Decrease);
      ASSERT_EQ(g.state(0, 0), d) << "Q=" << q;
    }
  }
}

TEST(SynapseGrid, RandomPulseSequencesStayInRange) {
  RandomStream rng(5);
  SynapseGrid g(4, 3, SynapseConfig{16, 3, -0.5, 0.5});
  for (int k = 0; k < 20000; ++k) {
    const auto i = rng.below(4), j = rng.below(3);
    const auto dir = static_cast<PulseDirection>(static_cast<int>(rng.below(3)) - 1);
    const auto before = g.state(i, j);
    const auto after = g.apply_pulse(i, j, dir);
    ASSERT_LE(after, 15);
    const int expected = std::clamp(int{before} + 3 * static_cast<int>(dir), 0, 15);
    ASSERT_EQ(after, expected);
  }
}

TEST(SynapseGrid, BiasPulsesSaturate) {
  SynapseGrid g(2, 2);
  g.set_visible_bias_state(0, 31);
  EXPECT_EQ(g.pulse_visible_bias(0, PulseDirection::Increase), 31);
  g.set_hidden_bias_state(1, 0);
  EXPECT_EQ(g.pulse_hidden_bias(1, PulseDirection::Decrease), 0);
  EXPECT_THROW(g.pulse_hidden_bias(2, PulseDirection::Decrease), IndexError);
}

TEST(SynapseGrid, RejectsBadConfig) {
  EXPECT_THROW(SynapseGrid(1, 1, SynapseConfig{1, 1, -1, 1}), DomainError);
  EXPECT_THROW(SynapseGrid(1, 1, SynapseConfig{8, 1, 1, 1}), DomainError);
}

TEST(SynapseGrid, FingerprintTracksState) {
  SynapseGrid a(3, 3), b(3, 3);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.apply_pulse(2, 1, PulseDirection::Increase);
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  b.apply_pulse(2, 1, PulseDirection::Decrease);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a, b);
}
