#ifndef REDQSIM_EVENT_QUEUE_H
#define REDQSIM_EVENT_QUEUE_H

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "redqsim/tcp.h"

namespace redqsim {

enum class EventKind : std::uint8_t {
  kArrivalAtNode,
  kLinkServiceComplete,
  kTimerExpiry,
  kFlowStart,
  kMeasurementBoundary,
};

struct Event {
  double time = 0.0;
  std::uint64_t sequence_no = 0;
  EventKind kind = EventKind::kMeasurementBoundary;
  int target = 0;  // node, link or flow index depending on kind
  Segment packet;  // kArrivalAtNode only
};

// Min-heap on (time, sequence_no). Sequence numbers come from insertion
// order, so simultaneous events dispatch first-scheduled-first.
class EventQueue {
 public:
  void schedule(double time, EventKind kind, int target, const Segment& packet = {}) {
    if (time < now_) throw std::logic_error("event scheduled in the past");
    heap_.push(Event{time, next_sequence_++, kind, target, packet});
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double now() const { return now_; }
  const Event& top() const { return heap_.top(); }

  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    now_ = e.time;
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence_no > b.sequence_no;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
  double now_ = 0.0;
};

}  // namespace redqsim

#endif  // REDQSIM_EVENT_QUEUE_H
