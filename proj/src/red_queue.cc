#include "redqsim/red_queue.h"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace redqsim {

namespace {

constexpr std::array<std::string_view, 5> kVariantNames = {
    "RED_1", "RED_2", "RED_3", "RED_4", "RED_5"};

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument(field + ": " + why);
}

}  // namespace

std::string_view variant_name(RedVariant v) {
  return kVariantNames[static_cast<std::size_t>(v)];
}

std::optional<RedVariant> parse_variant(std::string_view name) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (kVariantNames[i] == name) return static_cast<RedVariant>(i);
  }
  return std::nullopt;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kAccept: return "Accept";
    case Verdict::kRandomDrop: return "RandomDrop";
    case Verdict::kForcedDropAvg: return "ForcedDropAvg";
    case Verdict::kForcedDropBuffer: return "ForcedDropBuffer";
  }
  return "?";
}

void RedParams::validate() const {
  if (!(w_q > 0.0 && w_q <= 1.0)) bad_field("w_q", "must lie in (0, 1]");
  if (!(min_th >= 0.0)) bad_field("min_th", "must be >= 0");
  if (!(max_th > min_th)) bad_field("max_th", "must exceed min_th");
  if (buffer_cap <= 0) bad_field("buffer_cap", "must be positive");
  if (max_th > static_cast<double>(buffer_cap)) {
    bad_field("max_th", "must not exceed buffer_cap");
  }
  if (!(max_p > 0.0 && max_p <= 1.0)) bad_field("max_p", "must lie in (0, 1]");
  if (max_packet_size <= 0) bad_field("M", "must be positive");
}

double update_avg(RedState& state, const RedParams& params, std::int64_t q_now) {
  state.avg = (1.0 - params.w_q) * state.avg +
              params.w_q * static_cast<double>(q_now);
  return state.avg;
}

double compute_pb(double avg, const RedParams& params) {
  if (avg < params.min_th || avg >= params.max_th) {
    throw std::logic_error("compute_pb called outside the random-drop region");
  }
  const double p_b =
      params.max_p * (avg - params.min_th) / (params.max_th - params.min_th);
  return std::clamp(p_b, 0.0, params.max_p);
}

double compute_pa(RedVariant variant, double p_b, double count,
                  std::int64_t size, std::int64_t max_size) {
  const double s = static_cast<double>(size) / static_cast<double>(max_size);
  double numerator = p_b;
  double denominator = 1.0 - count * p_b;
  switch (variant) {
    case RedVariant::kRed1:
      break;
    case RedVariant::kRed2:
      // p_b itself is rescaled before the count correction.
      numerator = s * p_b;
      denominator = 1.0 - count * numerator;
      break;
    case RedVariant::kRed3:
    case RedVariant::kRed4:
      numerator = s * p_b;
      break;
    case RedVariant::kRed5:
      numerator = s * s * p_b;
      break;
  }
  if (denominator <= 0.0) return 1.0;
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

double count_increment(RedVariant variant, std::int64_t size,
                       std::int64_t max_size) {
  const double s = static_cast<double>(size) / static_cast<double>(max_size);
  switch (variant) {
    case RedVariant::kRed4: return s;
    case RedVariant::kRed5: return s * s;
    default: return 1.0;
  }
}

DropDecision on_packet_arrival(RedState& state, const RedParams& params,
                               std::int64_t size, double u) {
  update_avg(state, params, state.q);

  DropDecision d;
  if (state.q >= params.buffer_cap) {
    d.verdict = Verdict::kForcedDropBuffer;
    state.count = 0.0;
    return d;
  }
  if (state.avg < params.min_th) {
    state.count = 0.0;
    ++state.q;
    return d;
  }
  if (state.avg >= params.max_th) {
    d.verdict = Verdict::kForcedDropAvg;
    state.count = 0.0;
    return d;
  }

  // count holds the weight accepted since the last drop, excluding this
  // arrival, so the n-th arrival after a drop sees n-1 (uniform inter-drop law).
  d.p_b = compute_pb(state.avg, params);
  d.p_a = compute_pa(params.variant, d.p_b, state.count, size,
                     params.max_packet_size);
  if (u < d.p_a) {
    d.verdict = Verdict::kRandomDrop;
    state.count = 0.0;
    return d;
  }
  state.count += count_increment(params.variant, size, params.max_packet_size);
  ++state.q;
  return d;
}

}  // namespace redqsim
