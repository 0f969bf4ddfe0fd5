#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <queue>
#include <vector>

namespace whistle {

/// Kinds in tie-break priority order. ServerArrival marks the end of a
/// task's transfer, when it joins a server's queue.
enum class EventKind : std::uint8_t {
  WindowBoundary = 0,
  TaskArrival = 1,
  ServerArrival = 2,
  ServiceStart = 3,
  ServiceEnd = 4,
};

struct Event {
  double time{0.0};
  EventKind kind{EventKind::TaskArrival};
  std::uint64_t id{0};      // task index or window index
  std::size_t server{0};    // ServerArrival/ServiceStart/ServiceEnd only
};

/// Min-queue on (time, kind, id, insertion order).
class EventQueue {
 public:
  void push(const Event& event);
  Event pop();
  const Event& top() const;
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }

 private:
  struct Entry {
    Event event;
    std::uint64_t sequence;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const;
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_sequence_{0};
};

/// Single-server FIFO queue. `outstanding` counts tasks routed to the server
/// and not yet finished, including those still in transfer.
struct ServerQueue {
  std::deque<std::size_t> backlog;  // task indices waiting to start
  bool busy{false};
  double busy_time{0.0};
  std::size_t outstanding{0};
};

}  // namespace whistle
