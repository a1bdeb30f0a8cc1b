#ifndef REDQSIM_METRICS_H
#define REDQSIM_METRICS_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "redqsim/red_queue.h"
#include "redqsim/tcp.h"

namespace redqsim {

struct DropCounts {
  std::int64_t random = 0;
  std::int64_t forced_avg = 0;
  std::int64_t buffer = 0;

  std::int64_t total() const { return random + forced_avg + buffer; }
  DropCounts& operator+=(const DropCounts& o);
  DropCounts operator-(const DropCounts& o) const;
  bool operator==(const DropCounts&) const = default;
};

// Arrival accounting for one class of packets at a queue.
struct QueueCounters {
  std::int64_t arrivals = 0;
  std::int64_t accepted = 0;
  std::int64_t accepted_bytes = 0;
  DropCounts drops;

  void record(Verdict v, std::int64_t wire_size);
  QueueCounters operator-(const QueueCounters& o) const;
  bool operator==(const QueueCounters&) const = default;
};

struct GroupReport {
  std::int64_t mtu = 0;
  int flows = 0;
  double goodput_bps = 0.0;
  std::optional<double> plr;  // absent when the group had no arrivals
  QueueCounters counters;     // bottleneck, measurement interval only
};

// Whole-run bookkeeping at the bottleneck queue.
struct BottleneckAudit {
  std::int64_t arrivals = 0;
  std::int64_t accepted = 0;
  std::int64_t departures = 0;
  std::int64_t queued_at_end = 0;
  std::int64_t max_occupancy = 0;
  std::int64_t buffer_cap = 0;
  DropCounts drops;

  bool conserved() const {
    return arrivals == accepted + drops.total() &&
           accepted == departures + queued_at_end && max_occupancy <= buffer_cap;
  }
};

struct RunReport {
  std::string scenario_name;
  RedVariant red_variant = RedVariant::kRed1;
  TcpVariant tcp_variant = TcpVariant::kReno;
  double bottleneck_delay_s = 0.0;
  std::uint64_t seed = 0;
  double interval_s = 0.0;

  std::vector<GroupReport> groups;
  std::vector<double> flow_goodput_bps;
  std::vector<int> flow_group;
  std::vector<TcpSenderStats> flow_stats;
  double total_goodput_bps = 0.0;

  BottleneckAudit audit;
  std::int64_t events = 0;
  std::int64_t link_losses = 0;  // independent losses injected on the bottleneck
  std::int64_t max_reverse_occupancy = 0;
  bool stalled = false;
  std::vector<std::string> diagnostics;
};

// Goodput per group in bits/s: unique payload bytes delivered during the
// interval, summed over each group's flows.
std::vector<double> group_goodput(std::span<const std::int64_t> delivered_bytes,
                                  double interval_s,
                                  std::span<const int> group_of_flow,
                                  std::size_t group_count);

double flow_goodput(std::int64_t delivered_bytes, double interval_s);

// drops / arrivals per group over all causes; a group with no arrivals gets
// nullopt and a diagnostic appended to `diagnostics` if provided.
std::vector<std::optional<double>> group_plr(
    std::span<const QueueCounters> per_group,
    std::vector<std::string>* diagnostics = nullptr);

}  // namespace redqsim

#endif  // REDQSIM_METRICS_H
