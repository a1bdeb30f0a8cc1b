#include <algorithm>

#include "redqsim/tcp.h"

namespace redqsim {

namespace {

// How many recently touched blocks are remembered for SACK reporting.
constexpr std::size_t kRecencyDepth = 8;

}  // namespace

TcpReceiver::TcpReceiver(int flow_id, TcpVariant variant)
    : flow_id_(flow_id), variant_(variant) {}

std::optional<SackBlock> TcpReceiver::block_containing(std::int64_t seq) const {
  auto it = out_of_order_.upper_bound(seq);
  if (it == out_of_order_.begin()) return std::nullopt;
  --it;
  if (seq >= it->first && seq < it->second) return SackBlock{it->first, it->second};
  return std::nullopt;
}

Segment TcpReceiver::on_data(const Segment& segment) {
  const std::int64_t start = segment.seq;
  const std::int64_t end = segment.seq + segment.len;
  bool out_of_order = false;

  if (end <= rcv_nxt_) {
    duplicate_bytes_ += segment.len;
  } else if (start <= rcv_nxt_) {
    rcv_nxt_ = end;
    while (!out_of_order_.empty() && out_of_order_.begin()->first <= rcv_nxt_) {
      rcv_nxt_ = std::max(rcv_nxt_, out_of_order_.begin()->second);
      out_of_order_.erase(out_of_order_.begin());
    }
  } else {
    out_of_order = true;
    std::int64_t lo = start;
    std::int64_t hi = end;
    auto it = out_of_order_.upper_bound(lo);
    if (it != out_of_order_.begin()) {
      auto prev = std::prev(it);
      if (prev->second >= lo) {
        if (prev->second >= hi) duplicate_bytes_ += segment.len;
        lo = prev->first;
        hi = std::max(hi, prev->second);
        it = out_of_order_.erase(prev);
      }
    }
    while (it != out_of_order_.end() && it->first <= hi) {
      hi = std::max(hi, it->second);
      it = out_of_order_.erase(it);
    }
    out_of_order_[lo] = hi;
    recent_.insert(recent_.begin(), start);
    if (recent_.size() > kRecencyDepth) recent_.resize(kRecencyDepth);
  }

  Segment ack;
  ack.flow_id = flow_id_;
  ack.is_ack = true;
  ack.ack_no = rcv_nxt_;

  if (variant_ == TcpVariant::kSack) {
    std::erase_if(recent_, [this](std::int64_t s) { return s < rcv_nxt_; });
    // The first block covers the segment that triggered this ACK.
    if (out_of_order) {
      ack.sack_blocks[ack.sack_count++] = *block_containing(start);
    }
    for (auto s : recent_) {
      if (ack.sack_count == Segment::kMaxSackBlocks) break;
      auto b = block_containing(s);
      if (!b) continue;
      const auto reported = ack.sacks();
      if (std::find(reported.begin(), reported.end(), *b) != reported.end()) continue;
      ack.sack_blocks[ack.sack_count++] = *b;
    }
  }
  return ack;
}

}  // namespace redqsim
