#include "redqsim/metrics.h"

#include <stdexcept>

namespace redqsim {

DropCounts& DropCounts::operator+=(const DropCounts& o) {
  random += o.random;
  forced_avg += o.forced_avg;
  buffer += o.buffer;
  return *this;
}

DropCounts DropCounts::operator-(const DropCounts& o) const {
  return {random - o.random, forced_avg - o.forced_avg, buffer - o.buffer};
}

void QueueCounters::record(Verdict v, std::int64_t wire_size) {
  ++arrivals;
  switch (v) {
    case Verdict::kAccept:
      ++accepted;
      accepted_bytes += wire_size;
      break;
    case Verdict::kRandomDrop: ++drops.random; break;
    case Verdict::kForcedDropAvg: ++drops.forced_avg; break;
    case Verdict::kForcedDropBuffer: ++drops.buffer; break;
  }
}

QueueCounters QueueCounters::operator-(const QueueCounters& o) const {
  return {arrivals - o.arrivals, accepted - o.accepted,
          accepted_bytes - o.accepted_bytes, drops - o.drops};
}

double flow_goodput(std::int64_t delivered_bytes, double interval_s) {
  if (!(interval_s > 0.0)) throw std::invalid_argument("interval must be positive");
  return 8.0 * static_cast<double>(delivered_bytes) / interval_s;
}

std::vector<double> group_goodput(std::span<const std::int64_t> delivered_bytes,
                                  double interval_s,
                                  std::span<const int> group_of_flow,
                                  std::size_t group_count) {
  if (delivered_bytes.size() != group_of_flow.size()) {
    throw std::invalid_argument("one group index per flow required");
  }
  std::vector<double> out(group_count, 0.0);
  for (std::size_t f = 0; f < delivered_bytes.size(); ++f) {
    const auto g = static_cast<std::size_t>(group_of_flow[f]);
    if (g >= group_count) throw std::out_of_range("flow assigned to unknown group");
    out[g] += flow_goodput(delivered_bytes[f], interval_s);
  }
  return out;
}

std::vector<std::optional<double>> group_plr(std::span<const QueueCounters> per_group,
                                             std::vector<std::string>* diagnostics) {
  std::vector<std::optional<double>> out;
  out.reserve(per_group.size());
  for (std::size_t g = 0; g < per_group.size(); ++g) {
    const auto& c = per_group[g];
    if (c.arrivals <= 0) {
      out.emplace_back();
      if (diagnostics) {
        diagnostics->push_back("group " + std::to_string(g) +
                               ": no arrivals at the bottleneck, PLR omitted");
      }
      continue;
    }
    out.emplace_back(static_cast<double>(c.drops.total()) /
                     static_cast<double>(c.arrivals));
  }
  return out;
}

}  // namespace redqsim
