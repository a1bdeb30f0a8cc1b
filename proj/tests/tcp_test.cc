#include "redqsim/tcp.h"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "redqsim/rng.h"

using namespace redqsim;

namespace {

constexpr std::int64_t kMss = 1000;

TcpConfig config(TcpVariant v) {
  TcpConfig c;
  c.variant = v;
  c.mss = kMss;
  return c;
}

Segment ack_of(std::int64_t ack_no, std::vector<SackBlock> blocks = {}) {
  Segment a;
  a.is_ack = true;
  a.ack_no = ack_no;
  for (const auto& b : blocks) a.sack_blocks[a.sack_count++] = b;
  return a;
}

Segment data(std::int64_t seq, std::int64_t len = kMss) {
  Segment s;
  s.seq = seq;
  s.len = len;
  return s;
}

// Lossless two-node loop: everything in flight is delivered and acknowledged
// once per round trip.
struct Loop {
  TcpSender sender;
  TcpReceiver receiver;
  std::vector<Segment> in_flight;
  double now = 0.0;
  double rtt = 0.1;

  explicit Loop(TcpConfig c) : sender(0, c), receiver(0, c.variant) {
    in_flight = sender.start(now);
  }

  // `drop` decides which segments of this round are lost.
  void round(const std::function<bool(const Segment&)>& drop = {}) {
    now += rtt;
    std::vector<Segment> acks;
    for (const auto& s : in_flight) {
      if (drop && drop(s)) continue;
      acks.push_back(receiver.on_data(s));
    }
    in_flight.clear();
    for (const auto& a : acks) {
      for (auto& s : sender.on_ack(a, now)) in_flight.push_back(s);
    }
  }
};

}  // namespace

TEST(TcpSender, StartsWithOneSegment) {
  TcpSender s(0, config(TcpVariant::kReno));
  const auto out = s.start(0.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].seq, 0);
  EXPECT_EQ(out[0].len, kMss);
  EXPECT_EQ(out[0].wire_size(), kMss + kHeaderBytes);
  EXPECT_TRUE(s.timer_deadline().has_value());
}

TEST(TcpSender, FirstAckOpensTwoSegments) {
  TcpSender s(0, config(TcpVariant::kReno));
  s.start(0.0);
  const auto out = s.on_ack(ack_of(kMss), 0.1);
  EXPECT_EQ(s.state().cwnd, 2.0 * kMss);
  EXPECT_EQ(out.size(), 2u);
}

TEST(TcpSender, SlowStartDoublesPerRound) {
  Loop loop(config(TcpVariant::kReno));
  for (int r = 1; r <= 6; ++r) {
    loop.round();
    EXPECT_NEAR(loop.sender.state().cwnd, std::pow(2.0, r) * kMss, kMss) << "round " << r;
  }
}

TEST(TcpSender, TimeoutHalvesAndCollapses) {
  Loop loop(config(TcpVariant::kReno));
  for (int r = 0; r < 4; ++r) loop.round();
  ASSERT_EQ(loop.sender.state().cwnd, 16.0 * kMss);
  const double rto0 = loop.sender.state().rto;
  const auto rtx = loop.sender.on_timeout(loop.now + 1);
  EXPECT_EQ(loop.sender.state().ssthresh, 8.0 * kMss);
  EXPECT_EQ(loop.sender.state().cwnd, 1.0 * kMss);
  EXPECT_EQ(rtx.seq, loop.sender.state().snd_una);
  EXPECT_TRUE(rtx.retransmission);
  loop.sender.on_timeout(loop.now + 2);
  EXPECT_DOUBLE_EQ(loop.sender.state().rto, 4.0 * rto0);
  EXPECT_EQ(loop.sender.state().ssthresh, 2.0 * kMss);
}

TEST(TcpSender, RtoCappedAt64) {
  TcpSender s(0, config(TcpVariant::kReno));
  s.start(0.0);
  for (int i = 0; i < 10; ++i) s.on_timeout(i);
  EXPECT_EQ(s.state().rto, 64.0);
}

TEST(TcpSender, CongestionAvoidanceAddsOneSegmentPerRound) {
  Loop loop(config(TcpVariant::kReno));
  for (int r = 0; r < 5; ++r) loop.round();  // cwnd = 32 mss
  loop.in_flight.clear();
  loop.now += 1.0;
  loop.in_flight.push_back(loop.sender.on_timeout(loop.now));
  ASSERT_EQ(loop.sender.state().ssthresh, 16.0 * kMss);
  // Recovers the lost window, then slow start up to ssthresh.
  while (loop.sender.state().cwnd < loop.sender.state().ssthresh) loop.round();
  double prev = loop.sender.state().cwnd;
  double total = 0;
  constexpr int kRounds = 20;
  for (int r = 0; r < kRounds; ++r) {
    loop.round();
    const double grew = loop.sender.state().cwnd - prev;
    prev = loop.sender.state().cwnd;
    EXPECT_GT(grew, 0.8 * kMss);
    EXPECT_LT(grew, 1.1 * kMss);
    total += grew;
  }
  EXPECT_NEAR(total / kRounds, 1.0 * kMss, 0.1 * kMss);
}

TEST(TcpSender, CongestionAvoidanceAtThreshold) {
  Loop loop(config(TcpVariant::kReno));
  for (int r = 0; r < 3; ++r) loop.round();  // cwnd = 8
  loop.in_flight.clear();
  loop.now += 1.0;
  loop.in_flight.push_back(loop.sender.on_timeout(loop.now));  // ssthresh = 4
  while (loop.sender.state().cwnd < loop.sender.state().ssthresh) loop.round();
  ASSERT_EQ(loop.sender.state().cwnd, loop.sender.state().ssthresh);
  const double before = loop.sender.state().cwnd;
  const auto una = loop.sender.state().snd_una;
  loop.sender.on_ack(ack_of(una + kMss), loop.now + 0.1);
  EXPECT_DOUBLE_EQ(loop.sender.state().cwnd, before + double(kMss) * kMss / before);
}

TEST(TcpSender, RenoFastRetransmit) {
  Loop loop(config(TcpVariant::kReno));
  for (int r = 0; r < 3; ++r) loop.round();  // cwnd = 8, 8 segments out
  const double cwnd = loop.sender.state().cwnd;
  const auto una = loop.sender.state().snd_una;
  const auto retx_before = loop.sender.stats().retransmissions;

  std::vector<Segment> acks;
  for (const auto& s : loop.in_flight) {
    if (s.seq == una) continue;  // lose the head
    acks.push_back(loop.receiver.on_data(s));
  }
  std::vector<Segment> out;
  for (int i = 0; i < 3; ++i) {
    for (auto& s : loop.sender.on_ack(acks[static_cast<std::size_t>(i)], loop.now + 0.1)) {
      out.push_back(s);
    }
  }
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].seq, una);
  EXPECT_EQ(loop.sender.stats().retransmissions - retx_before, 1);
  EXPECT_EQ(loop.sender.state().ssthresh, std::max(cwnd / 2, 2.0 * kMss));
  EXPECT_EQ(loop.sender.state().cwnd, loop.sender.state().ssthresh + 3.0 * kMss);
  EXPECT_TRUE(loop.sender.state().in_fast_recovery);

  // Further dupacks inflate; the repair ACK deflates to ssthresh.
  for (std::size_t i = 3; i < acks.size(); ++i) loop.sender.on_ack(acks[i], loop.now + 0.1);
  EXPECT_EQ(loop.sender.state().cwnd,
            loop.sender.state().ssthresh + (3.0 + double(acks.size() - 3)) * kMss);
  const auto repaired = loop.receiver.on_data(out[0]);
  EXPECT_EQ(repaired.ack_no, una + 8 * kMss);
  loop.sender.on_ack(repaired, loop.now + 0.2);
  EXPECT_FALSE(loop.sender.state().in_fast_recovery);
  EXPECT_EQ(loop.sender.state().cwnd, loop.sender.state().ssthresh);
}

TEST(TcpSender, SackRepairsTwoHolesWithoutTimeout) {
  Loop loop(config(TcpVariant::kSack));
  for (int r = 0; r < 4; ++r) loop.round();  // 16 segments out
  const auto una = loop.sender.state().snd_una;
  const auto lost1 = una, lost2 = una + 5 * kMss;
  loop.round([&](const Segment& s) { return s.seq == lost1 || s.seq == lost2; });
  for (int r = 0; r < 4; ++r) loop.round();
  EXPECT_EQ(loop.sender.stats().timeouts, 0);
  EXPECT_EQ(loop.sender.stats().fast_retransmits, 1);
  EXPECT_EQ(loop.sender.stats().retransmissions, 2);
  EXPECT_FALSE(loop.sender.state().in_fast_recovery);
  EXPECT_GT(loop.receiver.delivered(), lost2);
  EXPECT_EQ(loop.receiver.delivered(), loop.sender.state().snd_una);
}

TEST(TcpSender, IgnoresStaleAndForeignAcks) {
  TcpSender s(3, config(TcpVariant::kReno));
  s.start(0.0);
  Segment foreign = ack_of(kMss);
  foreign.flow_id = 4;
  EXPECT_TRUE(s.on_ack(foreign, 0.1).empty());
  EXPECT_EQ(s.state().snd_una, 0);
  Segment future = ack_of(10 * kMss);
  future.flow_id = 3;
  EXPECT_TRUE(s.on_ack(future, 0.1).empty());
  EXPECT_EQ(s.state().snd_una, 0);
}

TEST(RtoUpdate, FloorAtOneTick) {
  TcpSender s(0, config(TcpVariant::kReno));
  EXPECT_DOUBLE_EQ(s.rto_update(0.05), 0.2);
}

TEST(RtoUpdate, RoundsUpToTick) {
  TcpSender s(0, config(TcpVariant::kReno));
  // First sample r: srtt = r, rttvar = r/2, so srtt + 4 rttvar = 3r = 0.25.
  EXPECT_DOUBLE_EQ(s.rto_update(0.25 / 3.0), 0.4);
}

TEST(RtoUpdate, ExactMultipleNotBumped) {
  TcpSender s(0, config(TcpVariant::kReno));
  EXPECT_DOUBLE_EQ(s.rto_update(0.2), 0.6);
}

TEST(RtoUpdate, ConvergesToConstantSample) {
  TcpSender s(0, config(TcpVariant::kReno));
  s.rto_update(1.0);
  for (int i = 0; i < 50; ++i) s.rto_update(0.3);
  EXPECT_NEAR(s.state().srtt, 0.3, 0.003);
  EXPECT_GE(s.state().rto, 0.2);
}

TEST(TcpReceiver, InOrderAdvances) {
  TcpReceiver r(0, TcpVariant::kReno);
  auto a = r.on_data(data(0));
  EXPECT_TRUE(a.is_ack);
  EXPECT_EQ(a.ack_no, kMss);
  EXPECT_EQ(a.wire_size(), kHeaderBytes);
  a = r.on_data(data(kMss, 500));
  EXPECT_EQ(a.ack_no, kMss + 500);
}

TEST(TcpReceiver, GapThenFillJumps) {
  TcpReceiver r(0, TcpVariant::kReno);
  r.on_data(data(0));
  EXPECT_EQ(r.on_data(data(2 * kMss)).ack_no, kMss);
  EXPECT_EQ(r.on_data(data(3 * kMss)).ack_no, kMss);
  EXPECT_EQ(r.buffered_blocks(), 1u);
  EXPECT_EQ(r.on_data(data(kMss)).ack_no, 4 * kMss);
  EXPECT_EQ(r.buffered_blocks(), 0u);
  EXPECT_EQ(r.delivered(), 4 * kMss);
}

TEST(TcpReceiver, RenoSendsNoBlocks) {
  TcpReceiver r(0, TcpVariant::kReno);
  EXPECT_EQ(r.on_data(data(2 * kMss)).sack_count, 0);
}

TEST(TcpReceiver, SackBlocksMostRecentFirst) {
  TcpReceiver r(0, TcpVariant::kSack);
  r.on_data(data(2 * kMss));
  r.on_data(data(4 * kMss));
  const auto a = r.on_data(data(6 * kMss));
  ASSERT_EQ(a.sack_count, 3);
  EXPECT_EQ(a.sack_blocks[0], (SackBlock{6 * kMss, 7 * kMss}));
  EXPECT_EQ(a.sack_blocks[1], (SackBlock{4 * kMss, 5 * kMss}));
  EXPECT_EQ(a.sack_blocks[2], (SackBlock{2 * kMss, 3 * kMss}));

  const auto b = r.on_data(data(5 * kMss));  // merges 4..7
  EXPECT_EQ(b.sack_blocks[0], (SackBlock{4 * kMss, 7 * kMss}));
  EXPECT_EQ(b.sack_blocks[1], (SackBlock{2 * kMss, 3 * kMss}));
  EXPECT_EQ(b.sack_count, 2);
}

TEST(TcpReceiver, DuplicatesCounted) {
  TcpReceiver r(0, TcpVariant::kSack);
  r.on_data(data(0));
  r.on_data(data(0));
  EXPECT_EQ(r.duplicate_bytes(), kMss);
  EXPECT_EQ(r.delivered(), kMss);
}

// Random loss and random timer expiries on the loop; checks the state
// invariants and that cumulative ACKs match what the receiver delivered.
TEST(TcpEndpoints, InvariantsUnderRandomLoss) {
  for (auto v : {TcpVariant::kReno, TcpVariant::kSack}) {
    Loop loop(config(v));
    Rng rng(v == TcpVariant::kReno ? 1 : 2);
    std::int64_t last_una = 0;
    for (int r = 0; r < 400; ++r) {
      loop.round([&](const Segment&) { return rng.uniform() < 0.03; });
      if (loop.in_flight.empty() || rng.uniform() < 0.02) {
        loop.now += loop.sender.state().rto;
        loop.in_flight.push_back(loop.sender.on_timeout(loop.now));
      }
      const auto& st = loop.sender.state();
      ASSERT_GE(st.cwnd, double(kMss));
      ASSERT_GE(st.ssthresh, 2.0 * kMss);
      ASSERT_LE(st.snd_una, st.snd_nxt);
      ASSERT_GE(st.snd_una, last_una);
      ASSERT_GE(st.rto, 0.2);
      ASSERT_EQ(loop.receiver.delivered(), st.snd_una);
      last_una = st.snd_una;
    }
    EXPECT_GT(last_una, 100 * kMss) << tcp_variant_name(v);
  }
}

TEST(TcpConfig, Validation) {
  TcpConfig c;
  c.rcv_wnd = c.mss;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TcpConfig{};
  c.timer_granularity = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(TcpVariantNames, CaseInsensitive) {
  EXPECT_EQ(parse_tcp_variant("SACK"), TcpVariant::kSack);
  EXPECT_EQ(parse_tcp_variant("reno"), TcpVariant::kReno);
  EXPECT_FALSE(parse_tcp_variant("vegas"));
}
