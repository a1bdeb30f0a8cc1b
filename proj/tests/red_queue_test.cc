#include "redqsim/red_queue.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <stdexcept>

#include "redqsim/rng.h"

using namespace redqsim;

namespace {

constexpr std::array kAllVariants{RedVariant::kRed1, RedVariant::kRed2, RedVariant::kRed3,
                                  RedVariant::kRed4, RedVariant::kRed5};

RedParams params_for(RedVariant v) {
  RedParams p;
  p.variant = v;
  return p;
}

}  // namespace

TEST(UpdateAvg, FixedPoints) {
  RedParams p;
  RedState s;
  EXPECT_DOUBLE_EQ(update_avg(s, p, 0), 0.0);
  s.avg = 100;
  EXPECT_DOUBLE_EQ(update_avg(s, p, 100), 100.0);
}

TEST(UpdateAvg, SingleStepFromZero) {
  RedParams p;
  RedState s;
  s.count = 3;
  s.q = 7;
  EXPECT_NEAR(update_avg(s, p, 100), 0.2, 1e-15);
  EXPECT_NEAR(s.avg, 0.2, 1e-15);
  EXPECT_EQ(s.count, 3);
  EXPECT_EQ(s.q, 7);
}

TEST(UpdateAvg, ConvexCombination) {
  Rng rng(11);
  RedParams p;
  RedState s;
  for (int i = 0; i < 20000; ++i) {
    p.w_q = rng.uniform(1e-4, 1.0);
    const double prev = s.avg;
    const auto q = static_cast<std::int64_t>(rng.uniform() * 300);
    const double avg = update_avg(s, p, q);
    EXPECT_GE(avg, std::min(prev, double(q)) - 1e-9);
    EXPECT_LE(avg, std::max(prev, double(q)) + 1e-9);
  }
}

TEST(ComputePb, Examples) {
  RedParams p;
  EXPECT_DOUBLE_EQ(compute_pb(40, p), 0.0);
  EXPECT_NEAR(compute_pb(80, p), 0.05, 1e-15);
  EXPECT_NEAR(compute_pb(60, p), 0.025, 1e-15);
}

TEST(ComputePb, RejectsOutOfRegion) {
  RedParams p;
  EXPECT_THROW(compute_pb(39.9, p), std::logic_error);
  EXPECT_THROW(compute_pb(120, p), std::logic_error);
}

TEST(ComputePa, Examples) {
  EXPECT_NEAR(compute_pa(RedVariant::kRed1, 0.1, 0, 1500, 1500), 0.1, 1e-15);
  EXPECT_NEAR(compute_pa(RedVariant::kRed1, 0.1, 5, 1500, 1500), 0.2, 1e-15);
  EXPECT_NEAR(compute_pa(RedVariant::kRed2, 0.1, 0, 750, 1500), 0.05, 1e-15);
  EXPECT_EQ(compute_pa(RedVariant::kRed1, 0.1, 10, 1500, 1500), 1.0);
  for (double c : {0.0, 1.0, 4.5, 9.0, 12.0}) {
    EXPECT_EQ(compute_pa(RedVariant::kRed5, 0.1, c, 1500, 1500),
              compute_pa(RedVariant::kRed1, 0.1, c, 1500, 1500));
  }
}

TEST(ComputePa, PerVariantFormulas) {
  const double pb = 0.08, c = 3;
  const double s = 500.0 / 1500.0;
  EXPECT_NEAR(compute_pa(RedVariant::kRed2, pb, c, 500, 1500), s * pb / (1 - c * s * pb), 1e-15);
  EXPECT_NEAR(compute_pa(RedVariant::kRed3, pb, c, 500, 1500), s * pb / (1 - c * pb), 1e-15);
  EXPECT_NEAR(compute_pa(RedVariant::kRed4, pb, c, 500, 1500), s * pb / (1 - c * pb), 1e-15);
  EXPECT_NEAR(compute_pa(RedVariant::kRed5, pb, c, 500, 1500), s * s * pb / (1 - c * pb), 1e-15);
}

TEST(ComputePa, Dominance) {
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    const double pb = rng.uniform(1e-3, 0.999);
    const double c = rng.uniform(1e-6, 1.0 / pb - 1e-6);
    const auto L = static_cast<std::int64_t>(rng.uniform(1, 1499));
    const double r2 = compute_pa(RedVariant::kRed2, pb, c, L, 1500);
    const double r3 = compute_pa(RedVariant::kRed3, pb, c, L, 1500);
    const double r5 = compute_pa(RedVariant::kRed5, pb, c, L, 1500);
    EXPECT_GE(r3, r2);
    EXPECT_LE(r5, r3);
  }
}

TEST(CountIncrement, PerVariant) {
  EXPECT_EQ(count_increment(RedVariant::kRed1, 750, 1500), 1.0);
  EXPECT_EQ(count_increment(RedVariant::kRed2, 750, 1500), 1.0);
  EXPECT_EQ(count_increment(RedVariant::kRed3, 750, 1500), 1.0);
  EXPECT_EQ(count_increment(RedVariant::kRed4, 750, 1500), 0.5);
  EXPECT_EQ(count_increment(RedVariant::kRed5, 750, 1500), 0.25);
}

TEST(Gatekeeper, BelowMinAccepts) {
  for (auto v : kAllVariants) {
    RedParams p = params_for(v);
    RedState s;
    s.count = 4;
    const auto d = on_packet_arrival(s, p, 375, 0.0);
    EXPECT_EQ(d.verdict, Verdict::kAccept);
    EXPECT_EQ(d.p_a, 0.0);
    EXPECT_EQ(s.count, 0.0);
    EXPECT_EQ(s.q, 1);
  }
}

TEST(Gatekeeper, AboveMaxForcesDrop) {
  RedParams p;
  RedState s;
  s.avg = 150;
  s.q = 150;
  s.count = 2;
  const auto d = on_packet_arrival(s, p, 1500, 0.999);
  EXPECT_EQ(d.verdict, Verdict::kForcedDropAvg);
  EXPECT_EQ(s.count, 0.0);
  EXPECT_EQ(s.q, 150);
}

TEST(Gatekeeper, FullBufferWinsOverRegion) {
  RedParams p;
  RedState s;
  s.q = p.buffer_cap;  // avg still 0
  const auto d = on_packet_arrival(s, p, 1500, 0.999);
  EXPECT_EQ(d.verdict, Verdict::kForcedDropBuffer);
  EXPECT_EQ(s.q, p.buffer_cap);
}

TEST(Gatekeeper, RandomRegionUsesDraw) {
  RedParams p;
  p.w_q = 1.0;  // avg tracks q exactly
  RedState s;
  s.q = 80;
  auto d = on_packet_arrival(s, p, 1500, 0.0499);
  EXPECT_EQ(d.verdict, Verdict::kRandomDrop);
  EXPECT_NEAR(d.p_b, 0.05, 1e-15);
  EXPECT_NEAR(d.p_a, 0.05, 1e-15);
  EXPECT_EQ(s.count, 0.0);

  d = on_packet_arrival(s, p, 1500, 0.0501);
  EXPECT_EQ(d.verdict, Verdict::kAccept);
  EXPECT_EQ(s.count, 1.0);
  EXPECT_EQ(s.q, 81);
}

TEST(Gatekeeper, PropertiesUnderRandomLoad) {
  for (auto v : kAllVariants) {
    RedParams p = params_for(v);
    p.w_q = 0.05;
    RedState s;
    Rng rng(42);
    for (int i = 0; i < 50000; ++i) {
      // Random walk on q so every region gets visited.
      if (s.q > 0 && rng.uniform() < 0.5) --s.q;
      const auto L = static_cast<std::int64_t>(rng.uniform(40, 1500));
      RedState before = s;
      const double u = rng.uniform();
      const auto d = on_packet_arrival(s, p, L, u);

      RedState replay = before;
      EXPECT_EQ(on_packet_arrival(replay, p, L, u), d);
      EXPECT_EQ(replay.avg, s.avg);
      EXPECT_EQ(replay.count, s.count);
      EXPECT_EQ(replay.q, s.q);

      EXPECT_GE(d.p_b, 0.0);
      EXPECT_LE(d.p_b, p.max_p);
      EXPECT_GE(d.p_a, 0.0);
      EXPECT_LE(d.p_a, 1.0);
      if (d.verdict == Verdict::kRandomDrop) EXPECT_GT(d.p_a, 0.0);
      if (d.dropped()) EXPECT_EQ(s.count, 0.0);
      EXPECT_LE(s.q, p.buffer_cap);
    }
  }
}

TEST(Gatekeeper, FullSizedPacketsReduceToRed1) {
  RedParams base;
  base.w_q = 0.01;
  for (auto v : kAllVariants) {
    RedParams p = base;
    p.variant = v;
    RedState a, b;
    Rng qa(9), ua(10);
    for (int i = 0; i < 100000; ++i) {
      if (a.q > 0 && qa.uniform() < 0.5) {
        --a.q;
        --b.q;
      }
      const double u = ua.uniform();
      ASSERT_EQ(on_packet_arrival(a, base, 1500, u), on_packet_arrival(b, p, 1500, u))
          << variant_name(v) << " at arrival " << i;
    }
  }
}

TEST(RedParams, ValidateNamesField) {
  RedParams p;
  p.max_th = 30;
  try {
    p.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("max_th"), std::string::npos);
  }
  p = RedParams{};
  p.w_q = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = RedParams{};
  EXPECT_NO_THROW(p.validate());
}

TEST(Names, RoundTrip) {
  for (auto v : kAllVariants) EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_FALSE(parse_variant("RED_6").has_value());
}
