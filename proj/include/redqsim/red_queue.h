#ifndef REDQSIM_RED_QUEUE_H
#define REDQSIM_RED_QUEUE_H

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace redqsim {

// The five ways of turning the average queue size into a per-packet drop
// probability. RED_1/RED_2 are the classic packet-mode and byte-weighted
// variants; RED_3..RED_5 weight the final probability by L/M or (L/M)^2.
enum class RedVariant { kRed1, kRed2, kRed3, kRed4, kRed5 };

std::string_view variant_name(RedVariant v);
std::optional<RedVariant> parse_variant(std::string_view name);

struct RedParams {
  double w_q = 0.002;
  double min_th = 40.0;   // packets
  double max_th = 120.0;  // packets
  double max_p = 0.1;
  std::int64_t max_packet_size = 1500;  // M, bytes
  RedVariant variant = RedVariant::kRed1;
  std::int64_t buffer_cap = 200;  // packets

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct RedState {
  double avg = 0.0;
  double count = 0.0;  // accepted weight since the last drop
  std::int64_t q = 0;  // instantaneous occupancy, packets
};

enum class Verdict { kAccept, kRandomDrop, kForcedDropAvg, kForcedDropBuffer };

std::string_view verdict_name(Verdict v);

struct DropDecision {
  Verdict verdict = Verdict::kAccept;
  double p_a = 0.0;
  double p_b = 0.0;

  bool dropped() const { return verdict != Verdict::kAccept; }
  bool operator==(const DropDecision&) const = default;
};

// EWMA update with the pre-enqueue occupancy. Only state.avg changes.
double update_avg(RedState& state, const RedParams& params, std::int64_t q_now);

// Temporary probability, linear between the thresholds. Throws
// std::logic_error if avg lies outside [min_th, max_th).
double compute_pb(double avg, const RedParams& params);

// Final probability for a packet of `size` bytes given the accepted weight
// since the last drop. A non-positive denominator yields 1.
double compute_pa(RedVariant variant, double p_b, double count,
                  std::int64_t size, std::int64_t max_size);

// Amount added to count when a packet of `size` bytes is accepted in the
// random-drop region.
double count_increment(RedVariant variant, std::int64_t size,
                       std::int64_t max_size);

// The gatekeeper. `u` is a uniform draw in [0, 1) supplied by the caller.
// On Accept, state.q is incremented; the owner decrements it on departure.
DropDecision on_packet_arrival(RedState& state, const RedParams& params,
                               std::int64_t size, double u);

}  // namespace redqsim

#endif  // REDQSIM_RED_QUEUE_H
