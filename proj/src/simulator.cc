#include "redqsim/simulator.h"

#include <algorithm>
#include <string>

namespace redqsim {

Topology build_dumbbell(const Scenario& scenario) {
  scenario.validate();
  Topology t;
  t.flow_count = scenario.flow_count();
  const auto& red = scenario.red;

  t.links.push_back({Topology::kRouterLeft, Topology::kRouterRight, scenario.bottleneck_rate,
                     scenario.bottleneck_delay, QueueDiscipline::kRed, red.buffer_cap});
  t.links.push_back({Topology::kRouterRight, Topology::kRouterLeft, scenario.bottleneck_rate,
                     scenario.bottleneck_delay, QueueDiscipline::kDropTail, red.buffer_cap});

  auto add = [&](int from, int to) {
    t.links.push_back({from, to, scenario.access_rate, scenario.access_delay,
                       QueueDiscipline::kDropTail, kAccessQueueCap});
    return static_cast<int>(t.links.size()) - 1;
  };

  int flow = 0;
  for (std::size_t g = 0; g < scenario.groups.size(); ++g) {
    for (int k = 0; k < scenario.groups[g].flow_count; ++k, ++flow) {
      t.flow_group.push_back(static_cast<int>(g));
      t.flow_mtu.push_back(scenario.groups[g].mtu);
      t.sender_uplink.push_back(add(t.sender_node(flow), Topology::kRouterLeft));
      t.ack_downlink.push_back(add(Topology::kRouterLeft, t.sender_node(flow)));
      t.data_downlink.push_back(add(Topology::kRouterRight, t.receiver_node(flow)));
      t.receiver_uplink.push_back(add(t.receiver_node(flow), Topology::kRouterRight));
    }
  }
  return t;
}

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)),
      topology_(build_dumbbell(scenario_)),
      rng_(scenario_.seed) {
  for (const auto& spec : topology_.links) {
    LinkRuntime l;
    l.spec = spec;
    links_.push_back(std::move(l));
  }
  group_counters_.resize(scenario_.groups.size());
  group_snapshot_.resize(scenario_.groups.size());

  const int n = topology_.flow_count;
  std::vector<double> starts;
  for (int f = 0; f < n; ++f) {
    starts.push_back(rng_.uniform() * scenario_.start_jitter);
  }
  for (int f = 0; f < n; ++f) {
    TcpConfig cfg;
    cfg.variant = scenario_.tcp_variant;
    cfg.mss = topology_.flow_mtu[static_cast<std::size_t>(f)] - kHeaderBytes;
    cfg.rcv_wnd = scenario_.rcv_wnd;
    cfg.timer_granularity = scenario_.timer_granularity;
    cfg.min_rto_ticks = scenario_.min_rto_ticks;
    cfg.start_time = starts[static_cast<std::size_t>(f)];
    senders_.emplace_back(f, cfg);
    receivers_.emplace_back(f, scenario_.tcp_variant);
  }
  timer_pending_.resize(static_cast<std::size_t>(n));
  delivered_snapshot_.assign(static_cast<std::size_t>(n), 0);

  if (n > 0) {
    for (int f = 0; f < n; ++f) {
      events_.schedule(starts[static_cast<std::size_t>(f)], EventKind::kFlowStart, f);
    }
    events_.schedule(scenario_.warmup, EventKind::kMeasurementBoundary, 0);
  }
}

std::int64_t Simulation::link_occupancy(int link) const {
  return static_cast<std::int64_t>(links_[static_cast<std::size_t>(link)].queue.size());
}

const RedState& Simulation::bottleneck_red_state() const {
  return links_[static_cast<std::size_t>(topology_.bottleneck_forward)].red;
}

void Simulation::run_until(double t) {
  const double limit = std::min(t, scenario_.duration);
  while (!events_.empty() && events_.top().time <= limit) {
    const Event e = events_.pop();
    dispatch(e);
    ++events_dispatched_;
    if (observer_) observer_(e, *this);
  }
}

RunReport Simulation::run() {
  run_until(scenario_.duration);
  finished_ = true;
  if (events_.empty() && topology_.flow_count > 0 && events_.now() < scenario_.duration) {
    stalled_ = true;
  }
  return report();
}

void Simulation::dispatch(const Event& e) {
  switch (e.kind) {
    case EventKind::kArrivalAtNode:
      on_arrival(e.target, e.packet);
      break;
    case EventKind::kLinkServiceComplete:
      finish_service(e.target);
      break;
    case EventKind::kTimerExpiry:
      on_timer(e.target, e.time);
      break;
    case EventKind::kFlowStart: {
      auto& s = senders_[static_cast<std::size_t>(e.target)];
      transmit(e.target, s.start(events_.now()));
      sync_timer(e.target);
      break;
    }
    case EventKind::kMeasurementBoundary:
      take_snapshot();
      break;
  }
}

void Simulation::on_arrival(int node, const Segment& packet) {
  const auto flow = static_cast<std::size_t>(packet.flow_id);
  if (node == Topology::kRouterLeft) {
    enqueue(packet.is_ack ? topology_.ack_downlink[flow] : topology_.bottleneck_forward, packet);
  } else if (node == Topology::kRouterRight) {
    enqueue(packet.is_ack ? topology_.bottleneck_reverse : topology_.data_downlink[flow], packet);
  } else if (node < 2 + topology_.flow_count) {
    transmit(packet.flow_id, senders_[flow].on_ack(packet, events_.now()));
    sync_timer(packet.flow_id);
  } else {
    enqueue(topology_.receiver_uplink[flow], receivers_[flow].on_data(packet));
  }
}

void Simulation::enqueue(int link, const Segment& packet) {
  auto& l = links_[static_cast<std::size_t>(link)];
  const std::int64_t size = packet.wire_size();
  Verdict verdict = Verdict::kAccept;
  if (l.spec.discipline == QueueDiscipline::kRed) {
    const double u = rng_.uniform();
    verdict = on_packet_arrival(l.red, scenario_.red, size, u).verdict;
    group_counters_[static_cast<std::size_t>(
        topology_.flow_group[static_cast<std::size_t>(packet.flow_id)])]
        .record(verdict, size);
  } else if (static_cast<std::int64_t>(l.queue.size()) >= l.spec.capacity) {
    verdict = Verdict::kForcedDropBuffer;
  }
  l.counters.record(verdict, size);
  if (verdict != Verdict::kAccept) return;

  l.queue.push_back(packet);
  l.max_occupancy = std::max(l.max_occupancy, static_cast<std::int64_t>(l.queue.size()));
  if (!l.busy) start_service(link);
}

void Simulation::start_service(int link) {
  auto& l = links_[static_cast<std::size_t>(link)];
  l.busy = true;
  const double tx = 8.0 * static_cast<double>(l.queue.front().wire_size()) / l.spec.rate;
  events_.schedule(events_.now() + tx, EventKind::kLinkServiceComplete, link);
}

void Simulation::finish_service(int link) {
  auto& l = links_[static_cast<std::size_t>(link)];
  const Segment packet = l.queue.front();
  l.queue.pop_front();
  ++l.departures;
  l.busy = false;
  if (l.spec.discipline == QueueDiscipline::kRed) --l.red.q;

  bool lost = false;
  if (link == topology_.bottleneck_forward && scenario_.bottleneck_loss > 0.0) {
    lost = rng_.uniform() < scenario_.bottleneck_loss;
  }
  if (lost) {
    ++link_losses_;
  } else {
    events_.schedule(events_.now() + l.spec.prop_delay, EventKind::kArrivalAtNode, l.spec.to,
                     packet);
  }
  if (!l.queue.empty()) start_service(link);
}

void Simulation::transmit(int flow, const std::vector<Segment>& segments) {
  const int uplink = topology_.sender_uplink[static_cast<std::size_t>(flow)];
  for (const auto& s : segments) enqueue(uplink, s);
}

void Simulation::on_timer(int flow, double fired_at) {
  auto& pending = timer_pending_[static_cast<std::size_t>(flow)];
  if (pending && *pending == fired_at) pending.reset();
  auto& s = senders_[static_cast<std::size_t>(flow)];
  const auto deadline = s.timer_deadline();
  if (!deadline) return;
  if (*deadline <= events_.now()) {
    transmit(flow, {s.on_timeout(events_.now())});
  }
  sync_timer(flow);
}

// Timer events are scheduled lazily: a restart that pushes the deadline
// later leaves the pending event in place and it re-arms when it fires.
void Simulation::sync_timer(int flow) {
  const auto deadline = senders_[static_cast<std::size_t>(flow)].timer_deadline();
  auto& pending = timer_pending_[static_cast<std::size_t>(flow)];
  if (!deadline) return;
  if (!pending || *deadline < *pending) {
    events_.schedule(*deadline, EventKind::kTimerExpiry, flow);
    pending = *deadline;
  }
}

void Simulation::take_snapshot() {
  group_snapshot_ = group_counters_;
  for (std::size_t f = 0; f < receivers_.size(); ++f) {
    delivered_snapshot_[f] = receivers_[f].delivered();
  }
}

RunReport Simulation::report() const {
  RunReport r;
  r.scenario_name = scenario_.name;
  r.red_variant = scenario_.red.variant;
  r.tcp_variant = scenario_.tcp_variant;
  r.bottleneck_delay_s = scenario_.bottleneck_delay;
  r.seed = scenario_.seed;
  r.interval_s = scenario_.duration - scenario_.warmup;
  r.events = events_dispatched_;
  r.link_losses = link_losses_;
  r.stalled = stalled_;

  const auto n = static_cast<std::size_t>(topology_.flow_count);
  std::vector<std::int64_t> delivered(n);
  for (std::size_t f = 0; f < n; ++f) {
    delivered[f] = receivers_[f].delivered() - delivered_snapshot_[f];
    r.flow_goodput_bps.push_back(flow_goodput(delivered[f], r.interval_s));
    r.flow_stats.push_back(senders_[f].stats());
  }
  r.flow_group = topology_.flow_group;

  const auto goodput = group_goodput(delivered, r.interval_s, topology_.flow_group,
                                     scenario_.groups.size());
  std::vector<QueueCounters> interval_counters;
  for (std::size_t g = 0; g < scenario_.groups.size(); ++g) {
    interval_counters.push_back(group_counters_[g] - group_snapshot_[g]);
  }
  const auto plr = group_plr(interval_counters, &r.diagnostics);
  for (std::size_t g = 0; g < scenario_.groups.size(); ++g) {
    GroupReport gr;
    gr.mtu = scenario_.groups[g].mtu;
    gr.flows = scenario_.groups[g].flow_count;
    gr.goodput_bps = goodput[g];
    gr.plr = plr[g];
    gr.counters = interval_counters[g];
    r.total_goodput_bps += goodput[g];
    r.groups.push_back(gr);
  }

  const auto& b = links_[static_cast<std::size_t>(topology_.bottleneck_forward)];
  r.audit.arrivals = b.counters.arrivals;
  r.audit.accepted = b.counters.accepted;
  r.audit.departures = b.departures;
  r.audit.queued_at_end = static_cast<std::int64_t>(b.queue.size());
  r.audit.max_occupancy = b.max_occupancy;
  r.audit.buffer_cap = scenario_.red.buffer_cap;
  r.audit.drops = b.counters.drops;
  r.max_reverse_occupancy =
      links_[static_cast<std::size_t>(topology_.bottleneck_reverse)].max_occupancy;

  if (stalled_) {
    r.diagnostics.push_back("event queue exhausted at t=" + std::to_string(events_.now()) +
                            " before duration; all flows stalled");
  }
  return r;
}

RunReport run(const Scenario& scenario) { return Simulation(scenario).run(); }

}  // namespace redqsim
