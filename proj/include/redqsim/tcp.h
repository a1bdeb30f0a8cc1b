#ifndef REDQSIM_TCP_H
#define REDQSIM_TCP_H

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace redqsim {

enum class TcpVariant { kReno, kSack };

std::string_view tcp_variant_name(TcpVariant v);
// Accepts "Reno" and "Sack" in any letter case.
std::optional<TcpVariant> parse_tcp_variant(std::string_view name);

// Fixed TCP/IP header model: wire size = payload + 40 bytes.
inline constexpr std::int64_t kHeaderBytes = 40;

struct TcpConfig {
  TcpVariant variant = TcpVariant::kReno;
  std::int64_t mss = 1460;
  std::int64_t rcv_wnd = 1 << 20;
  double timer_granularity = 0.2;
  int min_rto_ticks = 1;
  double start_time = 0.0;
  double initial_rto = 3.0;
  double max_rto = 64.0;

  void validate() const;
};

struct SackBlock {
  std::int64_t start = 0;
  std::int64_t end = 0;  // exclusive
  bool operator==(const SackBlock&) const = default;
};

struct Segment {
  static constexpr std::size_t kMaxSackBlocks = 3;

  int flow_id = 0;
  std::int64_t seq = 0;
  std::int64_t len = 0;  // payload bytes, 0 for pure ACKs
  bool is_ack = false;
  std::int64_t ack_no = 0;
  bool retransmission = false;
  std::array<SackBlock, kMaxSackBlocks> sack_blocks{};
  std::uint8_t sack_count = 0;

  std::int64_t wire_size() const { return len + kHeaderBytes; }
  std::span<const SackBlock> sacks() const { return {sack_blocks.data(), sack_count}; }
};

struct TcpSenderState {
  double cwnd = 0.0;      // bytes
  double ssthresh = 0.0;  // bytes
  std::int64_t snd_una = 0;
  std::int64_t snd_nxt = 0;
  std::int64_t snd_max = 0;  // highest sequence ever sent
  int dupacks = 0;
  bool in_fast_recovery = false;
  std::int64_t recover = 0;  // snd_max when recovery began (SACK)
  bool has_rtt = false;
  double srtt = 0.0;
  double rttvar = 0.0;
  double rto = 0.0;
  int backoff = 1;
};

struct TcpSenderStats {
  std::int64_t segments_sent = 0;
  std::int64_t retransmissions = 0;
  std::int64_t fast_retransmits = 0;
  std::int64_t timeouts = 0;
};

// Bulk-transfer sender with an infinite backlog of MSS-sized segments.
// Reno follows the classic RFC 2001 fast retransmit / fast recovery; SACK
// uses a per-segment scoreboard and a pipe estimate during recovery.
class TcpSender {
 public:
  TcpSender(int flow_id, TcpConfig config);

  // Opens the window: the first segment at `now`.
  std::vector<Segment> start(double now);
  std::vector<Segment> on_ack(const Segment& ack, double now);
  // Retransmission timer expiry; returns the retransmitted head segment.
  Segment on_timeout(double now);
  // Feeds one RTT sample into the estimator and returns the new rto.
  double rto_update(double rtt_sample);

  // Absolute expiry time of the retransmission timer, if armed.
  std::optional<double> timer_deadline() const { return timer_deadline_; }

  const TcpSenderState& state() const { return state_; }
  const TcpSenderStats& stats() const { return stats_; }
  const TcpConfig& config() const { return config_; }
  int flow_id() const { return flow_id_; }

  // Bytes covered by a SACK block above snd_una (0 for Reno).
  std::int64_t sacked_bytes() const;

 private:
  struct SegmentMark {
    bool sacked = false;
    bool retransmitted = false;
  };

  Segment emit(std::int64_t seq, double now);
  void send_allowed(std::vector<Segment>& out, double now);
  void send_allowed_sack(std::vector<Segment>& out, double now);
  void on_new_ack(const Segment& ack, double now);
  void on_dup_ack(std::vector<Segment>& out, double now);
  void apply_sack_blocks(const Segment& ack);
  std::int64_t pipe() const;
  std::optional<std::int64_t> next_lost_segment() const;
  void grow_window();
  void restart_timer(double now);
  double window_limit() const;

  int flow_id_;
  TcpConfig config_;
  TcpSenderState state_;
  TcpSenderStats stats_;
  std::optional<double> timer_deadline_;
  std::optional<std::int64_t> timed_seq_;
  double timed_at_ = 0.0;
  // One entry per MSS segment in [snd_una, snd_max), SACK variant only.
  std::deque<SegmentMark> scoreboard_;
};

// Sink side: cumulative ACKs, one per data segment, with up to three SACK
// blocks (most recent first) when the SACK option is enabled.
class TcpReceiver {
 public:
  TcpReceiver(int flow_id, TcpVariant variant);

  Segment on_data(const Segment& segment);

  // In-order payload bytes delivered so far.
  std::int64_t delivered() const { return rcv_nxt_; }
  std::int64_t duplicate_bytes() const { return duplicate_bytes_; }
  std::size_t buffered_blocks() const { return out_of_order_.size(); }

 private:
  std::optional<SackBlock> block_containing(std::int64_t seq) const;

  int flow_id_;
  TcpVariant variant_;
  std::int64_t rcv_nxt_ = 0;
  std::int64_t duplicate_bytes_ = 0;
  std::map<std::int64_t, std::int64_t> out_of_order_;  // start -> end
  std::vector<std::int64_t> recent_;  // block starts, most recent first
};

}  // namespace redqsim

#endif  // REDQSIM_TCP_H
