#ifndef REDQSIM_SIMULATOR_H
#define REDQSIM_SIMULATOR_H

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "redqsim/event_queue.h"
#include "redqsim/metrics.h"
#include "redqsim/red_queue.h"
#include "redqsim/rng.h"
#include "redqsim/scenario.h"
#include "redqsim/tcp.h"

namespace redqsim {

enum class QueueDiscipline { kRed, kDropTail };

// Access-side queues never bind: hosts are window-limited and access links
// are faster than the bottleneck.
inline constexpr std::int64_t kAccessQueueCap = 1 << 20;

// One direction of a point-to-point link.
struct LinkSpec {
  int from = 0;
  int to = 0;
  double rate = 0.0;        // bits/s
  double prop_delay = 0.0;  // s
  QueueDiscipline discipline = QueueDiscipline::kDropTail;
  std::int64_t capacity = 0;  // packets, including the one in service
};

// Nodes: 0 = R1, 1 = R2, 2..N+1 senders, N+2..2N+1 receivers.
struct Topology {
  int flow_count = 0;
  int router_count = 2;
  std::vector<LinkSpec> links;  // simplex channels
  int bottleneck_forward = 0;   // R1 -> R2, RED
  int bottleneck_reverse = 1;   // R2 -> R1, FIFO (ACKs)
  std::vector<int> sender_uplink;    // S_i -> R1
  std::vector<int> ack_downlink;     // R1 -> S_i
  std::vector<int> data_downlink;    // R2 -> D_i
  std::vector<int> receiver_uplink;  // D_i -> R2
  std::vector<int> flow_group;
  std::vector<std::int64_t> flow_mtu;

  static constexpr int kRouterLeft = 0;
  static constexpr int kRouterRight = 1;
  int sender_node(int flow) const { return 2 + flow; }
  int receiver_node(int flow) const { return 2 + flow_count + flow; }
  int node_count() const { return 2 + 2 * flow_count; }
  // Full-duplex links: one access link per host plus the bottleneck.
  int duplex_link_count() const { return flow_count == 0 ? 1 : 2 * flow_count + 1; }
};

Topology build_dumbbell(const Scenario& scenario);

// A single dumbbell run. Randomness comes from one generator seeded by
// scenario.seed, drawn in this order: every flow's start jitter (flow
// order), then one draw per bottleneck arrival in event order (plus one per
// bottleneck departure when bottleneck_loss > 0).
class Simulation {
 public:
  using Observer = std::function<void(const Event&, const Simulation&)>;

  explicit Simulation(Scenario scenario);

  // Called after every dispatched event.
  void set_observer(Observer observer) { observer_ = std::move(observer); }

  // Dispatches events with time <= t (capped at the scenario duration).
  void run_until(double t);
  RunReport run();
  RunReport report() const;

  double now() const { return events_.now(); }
  std::int64_t events_dispatched() const { return events_dispatched_; }
  const Scenario& scenario() const { return scenario_; }
  const Topology& topology() const { return topology_; }
  const TcpSender& sender(int flow) const { return senders_[static_cast<std::size_t>(flow)]; }
  const TcpReceiver& receiver(int flow) const { return receivers_[static_cast<std::size_t>(flow)]; }
  std::int64_t link_occupancy(int link) const;
  bool link_busy(int link) const { return links_[static_cast<std::size_t>(link)].busy; }
  const RedState& bottleneck_red_state() const;

 private:
  struct LinkRuntime {
    LinkSpec spec;
    std::deque<Segment> queue;  // front is in service when busy
    bool busy = false;
    RedState red;
    QueueCounters counters;
    std::int64_t departures = 0;
    std::int64_t max_occupancy = 0;
  };

  void dispatch(const Event& e);
  void on_arrival(int node, const Segment& packet);
  void enqueue(int link, const Segment& packet);
  void start_service(int link);
  void finish_service(int link);
  void transmit(int flow, const std::vector<Segment>& segments);
  void on_timer(int flow, double fired_at);
  void sync_timer(int flow);
  void take_snapshot();

  Scenario scenario_;
  Topology topology_;
  EventQueue events_;
  Rng rng_;
  std::vector<LinkRuntime> links_;
  std::vector<TcpSender> senders_;
  std::vector<TcpReceiver> receivers_;
  std::vector<std::optional<double>> timer_pending_;
  std::vector<QueueCounters> group_counters_;
  std::vector<QueueCounters> group_snapshot_;
  std::vector<std::int64_t> delivered_snapshot_;
  std::int64_t events_dispatched_ = 0;
  std::int64_t link_losses_ = 0;
  bool finished_ = false;
  bool stalled_ = false;
  Observer observer_;
};

// Convenience: Simulation(scenario).run().
RunReport run(const Scenario& scenario);

}  // namespace redqsim

#endif  // REDQSIM_SIMULATOR_H
