#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "redqsim/tcp.h"

namespace redqsim {

namespace {

// A hole is presumed lost once this many segments above it were SACKed.
constexpr int kDupThresh = 3;

}  // namespace

std::string_view tcp_variant_name(TcpVariant v) {
  return v == TcpVariant::kReno ? "Reno" : "Sack";
}

std::optional<TcpVariant> parse_tcp_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "reno") return TcpVariant::kReno;
  if (lower == "sack") return TcpVariant::kSack;
  return std::nullopt;
}

void TcpConfig::validate() const {
  if (mss <= 0) throw std::invalid_argument("mss: must be positive");
  if (rcv_wnd < 2 * mss) throw std::invalid_argument("rcv_wnd: must be at least 2*mss");
  if (!(timer_granularity > 0.0)) {
    throw std::invalid_argument("timer_granularity: must be positive");
  }
  if (min_rto_ticks < 1) throw std::invalid_argument("min_rto_ticks: must be >= 1");
}

TcpSender::TcpSender(int flow_id, TcpConfig config)
    : flow_id_(flow_id), config_(config) {
  config_.validate();
  state_.cwnd = static_cast<double>(config_.mss);
  state_.ssthresh = static_cast<double>(config_.rcv_wnd);
  state_.rto = config_.initial_rto;
}

std::vector<Segment> TcpSender::start(double now) {
  std::vector<Segment> out;
  send_allowed(out, now);
  return out;
}

double TcpSender::window_limit() const {
  return std::min(state_.cwnd, static_cast<double>(config_.rcv_wnd));
}

void TcpSender::restart_timer(double now) { timer_deadline_ = now + state_.rto; }

Segment TcpSender::emit(std::int64_t seq, double now) {
  Segment s;
  s.flow_id = flow_id_;
  s.seq = seq;
  s.len = config_.mss;
  s.retransmission = seq < state_.snd_max;
  ++stats_.segments_sent;
  if (s.retransmission) {
    ++stats_.retransmissions;
    timed_seq_.reset();  // Karn: no samples across a retransmission
  } else if (!timed_seq_) {
    timed_seq_ = seq;
    timed_at_ = now;
  }
  const std::int64_t end = seq + config_.mss;
  if (end > state_.snd_max) {
    if (config_.variant == TcpVariant::kSack) {
      scoreboard_.resize(scoreboard_.size() +
                         static_cast<std::size_t>((end - state_.snd_max) / config_.mss));
    }
    state_.snd_max = end;
  }
  if (!timer_deadline_) restart_timer(now);
  return s;
}

void TcpSender::send_allowed(std::vector<Segment>& out, double now) {
  const double limit = window_limit();
  while (static_cast<double>(state_.snd_nxt + config_.mss - state_.snd_una) <= limit) {
    out.push_back(emit(state_.snd_nxt, now));
    state_.snd_nxt += config_.mss;
  }
}

std::int64_t TcpSender::pipe() const {
  std::int64_t segments = 0;
  int sacked_above = 0;
  for (auto it = scoreboard_.rbegin(); it != scoreboard_.rend(); ++it) {
    if (it->sacked) {
      ++sacked_above;
      continue;
    }
    if (sacked_above < kDupThresh) ++segments;
    if (it->retransmitted) ++segments;
  }
  return segments * config_.mss;
}

std::optional<std::int64_t> TcpSender::next_lost_segment() const {
  // Walk from the top to know how many SACKed segments lie above each hole,
  // keeping the lowest qualifying one.
  std::optional<std::int64_t> lowest;
  int sacked_above = 0;
  for (std::size_t k = scoreboard_.size(); k-- > 0;) {
    const auto& m = scoreboard_[k];
    if (m.sacked) {
      ++sacked_above;
    } else if (!m.retransmitted && sacked_above >= kDupThresh) {
      lowest = state_.snd_una + static_cast<std::int64_t>(k) * config_.mss;
    }
  }
  return lowest;
}

void TcpSender::send_allowed_sack(std::vector<Segment>& out, double now) {
  const double limit = window_limit();
  for (;;) {
    if (static_cast<double>(pipe() + config_.mss) > limit) break;
    if (auto hole = next_lost_segment()) {
      const auto idx = static_cast<std::size_t>((*hole - state_.snd_una) / config_.mss);
      scoreboard_[idx].retransmitted = true;
      out.push_back(emit(*hole, now));
      continue;
    }
    if (state_.snd_nxt + config_.mss - state_.snd_una > config_.rcv_wnd) break;
    const std::int64_t seq = state_.snd_nxt;
    state_.snd_nxt += config_.mss;
    const bool resend = seq < state_.snd_max;
    out.push_back(emit(seq, now));
    if (resend) {
      scoreboard_[static_cast<std::size_t>((seq - state_.snd_una) / config_.mss)]
          .retransmitted = true;
    }
  }
}

void TcpSender::apply_sack_blocks(const Segment& ack) {
  for (const auto& b : ack.sacks()) {
    const std::int64_t lo = std::max(b.start, state_.snd_una);
    const std::int64_t hi = std::min(b.end, state_.snd_max);
    for (std::int64_t seq = lo; seq + config_.mss <= hi; seq += config_.mss) {
      scoreboard_[static_cast<std::size_t>((seq - state_.snd_una) / config_.mss)].sacked = true;
    }
  }
}

void TcpSender::grow_window() {
  const auto mss = static_cast<double>(config_.mss);
  if (state_.cwnd < state_.ssthresh) {
    state_.cwnd += mss;
  } else {
    state_.cwnd += mss * mss / state_.cwnd;
  }
  state_.cwnd = std::min(state_.cwnd, static_cast<double>(config_.rcv_wnd));
}

void TcpSender::on_new_ack(const Segment& ack, double now) {
  const std::int64_t acked = ack.ack_no - state_.snd_una;
  state_.snd_una = ack.ack_no;
  state_.snd_nxt = std::max(state_.snd_nxt, state_.snd_una);
  if (config_.variant == TcpVariant::kSack) {
    const auto n = std::min(scoreboard_.size(), static_cast<std::size_t>(acked / config_.mss));
    scoreboard_.erase(scoreboard_.begin(), scoreboard_.begin() + static_cast<std::ptrdiff_t>(n));
  }

  if (timed_seq_ && ack.ack_no > *timed_seq_) {
    rto_update(now - timed_at_);
    timed_seq_.reset();
  }

  if (state_.in_fast_recovery) {
    if (config_.variant == TcpVariant::kReno || ack.ack_no >= state_.recover) {
      state_.cwnd = state_.ssthresh;
      state_.in_fast_recovery = false;
    }
  } else {
    grow_window();
  }
  state_.dupacks = 0;

  if (state_.snd_una >= state_.snd_max) {
    timer_deadline_.reset();
  } else {
    restart_timer(now);
  }
}

void TcpSender::on_dup_ack(std::vector<Segment>& out, double now) {
  ++state_.dupacks;
  const auto mss = static_cast<double>(config_.mss);
  if (!state_.in_fast_recovery && state_.dupacks == kDupThresh) {
    ++stats_.fast_retransmits;
    state_.ssthresh = std::max(state_.cwnd / 2.0, 2.0 * mss);
    state_.in_fast_recovery = true;
    state_.recover = state_.snd_max;
    timer_deadline_.reset();
    if (config_.variant == TcpVariant::kSack) {
      state_.cwnd = state_.ssthresh;
      if (!scoreboard_.empty()) scoreboard_.front().retransmitted = true;
    } else {
      state_.cwnd = state_.ssthresh + 3.0 * mss;
    }
    out.push_back(emit(state_.snd_una, now));
    restart_timer(now);
  } else if (state_.in_fast_recovery && config_.variant == TcpVariant::kReno) {
    state_.cwnd += mss;
  }
}

std::vector<Segment> TcpSender::on_ack(const Segment& ack, double now) {
  std::vector<Segment> out;
  if (!ack.is_ack || ack.flow_id != flow_id_) return out;
  if (ack.ack_no > state_.snd_max) return out;

  if (ack.ack_no > state_.snd_una) {
    on_new_ack(ack, now);
    if (config_.variant == TcpVariant::kSack) apply_sack_blocks(ack);
  } else if (ack.ack_no == state_.snd_una && state_.snd_max > state_.snd_una) {
    if (config_.variant == TcpVariant::kSack) apply_sack_blocks(ack);
    on_dup_ack(out, now);
  } else {
    return out;  // stale
  }

  if (config_.variant == TcpVariant::kSack && state_.in_fast_recovery) {
    send_allowed_sack(out, now);
  } else {
    send_allowed(out, now);
  }
  return out;
}

Segment TcpSender::on_timeout(double now) {
  ++stats_.timeouts;
  const auto mss = static_cast<double>(config_.mss);
  state_.ssthresh = std::max(state_.cwnd / 2.0, 2.0 * mss);
  state_.cwnd = mss;
  state_.in_fast_recovery = false;
  state_.dupacks = 0;
  state_.rto = std::min(state_.rto * 2.0, config_.max_rto);
  state_.backoff *= 2;
  timed_seq_.reset();
  // Go back N; SACK information is discarded since the receiver may renege.
  state_.snd_nxt = state_.snd_una;
  for (auto& m : scoreboard_) m = SegmentMark{};
  Segment s = emit(state_.snd_una, now);
  state_.snd_nxt += config_.mss;
  restart_timer(now);
  return s;
}

double TcpSender::rto_update(double rtt_sample) {
  if (!state_.has_rtt) {
    state_.srtt = rtt_sample;
    state_.rttvar = rtt_sample / 2.0;
    state_.has_rtt = true;
  } else {
    state_.rttvar = 0.75 * state_.rttvar + 0.25 * std::abs(state_.srtt - rtt_sample);
    state_.srtt = 0.875 * state_.srtt + 0.125 * rtt_sample;
  }
  const double g = config_.timer_granularity;
  const double raw = state_.srtt + 4.0 * state_.rttvar;
  // The epsilon keeps exact multiples of the tick from rounding up.
  double ticks = std::ceil(raw / g - 1e-9);
  ticks = std::max(ticks, static_cast<double>(std::max(1, config_.min_rto_ticks)));
  state_.rto = std::min(ticks * g, config_.max_rto);
  state_.backoff = 1;
  return state_.rto;
}

std::int64_t TcpSender::sacked_bytes() const {
  std::int64_t n = 0;
  for (const auto& m : scoreboard_) n += m.sacked ? 1 : 0;
  return n * config_.mss;
}

}  // namespace redqsim
