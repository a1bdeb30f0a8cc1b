#include "redqsim/scenario.h"

namespace redqsim {

Scenario Scenario::standard(RedVariant variant, TcpVariant tcp,
                                 double bottleneck_delay_s) {
  Scenario s;
  s.name = "standard";
  s.red.variant = variant;
  s.tcp_variant = tcp;
  s.bottleneck_delay = bottleneck_delay_s;
  s.groups = {{20, 1500}, {20, 750}, {20, 375}};
  return s;
}

int Scenario::flow_count() const {
  int n = 0;
  for (const auto& g : groups) n += g.flow_count;
  return n;
}

void Scenario::validate() const {
  try {
    red.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(msg.substr(0, colon),
                      colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
  if (!(duration > 0.0)) throw ConfigError("duration", "must be positive");
  if (!(warmup >= 0.0 && warmup < duration)) {
    throw ConfigError("warmup", "must satisfy 0 <= warmup < duration");
  }
  if (!(bottleneck_rate > 0.0)) throw ConfigError("bottleneck_rate_mbps", "must be positive");
  if (!(access_rate > 0.0)) throw ConfigError("access_rate_mbps", "must be positive");
  if (!(bottleneck_delay >= 0.0)) throw ConfigError("bottleneck_delay_ms", "must be >= 0");
  if (!(access_delay >= 0.0)) throw ConfigError("access_delay_ms", "must be >= 0");
  if (!(timer_granularity > 0.0)) throw ConfigError("timer_granularity_ms", "must be positive");
  if (min_rto_ticks < 1) throw ConfigError("min_rto_ticks", "must be >= 1");
  if (!(start_jitter >= 0.0)) throw ConfigError("start_jitter_s", "must be >= 0");
  if (!(bottleneck_loss >= 0.0 && bottleneck_loss < 1.0)) {
    throw ConfigError("bottleneck_loss", "must lie in [0, 1)");
  }
  for (const auto& g : groups) {
    if (g.flow_count < 1) throw ConfigError("flows", "every group needs at least one flow");
    if (g.mtu <= kHeaderBytes) throw ConfigError("mtu", "must exceed the 40-byte header");
    if (g.mtu > red.max_packet_size) throw ConfigError("mtu", "must not exceed M");
    if (rcv_wnd < 2 * (g.mtu - kHeaderBytes)) throw ConfigError("rcv_wnd", "must be at least 2*mss");
  }
}

}  // namespace redqsim
