#ifndef REDQSIM_SCENARIO_H
#define REDQSIM_SCENARIO_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "redqsim/red_queue.h"
#include "redqsim/tcp.h"

namespace redqsim {

// Invalid configuration; what() starts with the offending field name.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& why)
      : std::invalid_argument(field + ": " + why), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct FlowGroup {
  int flow_count = 20;
  std::int64_t mtu = 1500;  // wire size of data packets
};

// Dumbbell experiment description. Rates in bits/s, times in seconds.
struct Scenario {
  std::string name = "default";
  double duration = 60.0;
  double warmup = 10.0;
  std::uint64_t seed = 1;
  TcpVariant tcp_variant = TcpVariant::kReno;
  RedParams red;
  double bottleneck_rate = 30e6;
  double access_rate = 100e6;
  double bottleneck_delay = 0.015;
  double access_delay = 0.001;
  double timer_granularity = 0.2;
  int min_rto_ticks = 1;
  std::int64_t rcv_wnd = 1 << 20;
  double start_jitter = 1.0;  // flow starts uniform on [0, start_jitter)
  // Independent per-packet loss on the forward bottleneck. Zero in every
  // experiment; used to calibrate against the loss-rate goodput bound.
  double bottleneck_loss = 0.0;
  std::vector<FlowGroup> groups;

  // Three groups of 20 flows with MTUs 1500/750/375 on a 30 Mbit/s link.
  static Scenario standard(RedVariant variant, TcpVariant tcp,
                                double bottleneck_delay_s);

  int flow_count() const;
  // Propagation-only round trip: 2 * (bottleneck + 2 * access).
  double rtt_floor() const { return 2.0 * (bottleneck_delay + 2.0 * access_delay); }

  // Throws ConfigError.
  void validate() const;
};

}  // namespace redqsim

#endif  // REDQSIM_SCENARIO_H
