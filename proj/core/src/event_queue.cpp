#include "whistle/event_queue.hpp"

#include <tuple>

#include "whistle/errors.hpp"

namespace whistle {

bool EventQueue::Later::operator()(const Entry& a, const Entry& b) const {
  return std::tie(a.event.time, a.event.kind, a.event.id, a.sequence) >
         std::tie(b.event.time, b.event.kind, b.event.id, b.sequence);
}

void EventQueue::push(const Event& event) { heap_.push({event, next_sequence_++}); }

Event EventQueue::pop() {
  if (heap_.empty()) throw ContractError("pop from empty event queue");
  Event e = heap_.top().event;
  heap_.pop();
  return e;
}

const Event& EventQueue::top() const {
  if (heap_.empty()) throw ContractError("top of empty event queue");
  return heap_.top().event;
}

}  // namespace whistle
