#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace whistle {

template <typename Tag>
struct StrongId {
  std::uint32_t value{};

  constexpr auto operator<=>(const StrongId&) const = default;
};

using ServiceId = StrongId<struct ServiceTag>;
using EdgeId = StrongId<struct EdgeTag>;
using TaskId = std::uint64_t;

/// Fixed-width content digest of one input item.
using Digest = std::uint64_t;

/// Ordered content digests of a task input. Equality of digests stands in
/// for equality of content.
struct InputDescriptor {
  std::vector<Digest> items;

  bool empty() const noexcept { return items.empty(); }
  std::size_t size() const noexcept { return items.size(); }

  auto operator<=>(const InputDescriptor&) const = default;
};

/// Stable 64-bit fingerprint of a descriptor (FNV-1a over the digests).
std::uint64_t fingerprint(const InputDescriptor& input) noexcept;

struct Task {
  TaskId id{};
  ServiceId service{};
  InputDescriptor input;
  double input_size{};   // megabits
  double complexity{};   // compute units
  double output_size{};  // megabits
  double arrival_time{};  // seconds
  std::optional<EdgeId> origin_edge;  // unset in raw traces; the simulator assigns one
};

/// Communication and computation saved per task when a service is hosted at
/// an edge, weighted by its potential reusability.
struct OffloadingGain {
  double saved_input{};       // megabits
  double saved_complexity{};  // compute units
};

struct Service {
  ServiceId id{};
  double granularity{};
  double reusability{};
  double punishment{};
  bool evicted{false};
  OffloadingGain gain;
};

struct CloudServer {
  double compute_capacity{};  // compute units / s
  double bandwidth{};         // Mb/s along the user-to-cloud path
};

/// Static profile of an edge server. Runtime state (hosted services, reuse
/// table, queue) lives with the simulator's edge nodes.
struct EdgeServer {
  EdgeId id{};
  double compute_capacity{};  // compute units / s
  double bandwidth{};         // Mb/s along the user-to-edge path
  int service_quota{1};
  std::vector<EdgeId> neighbors;
};

}  // namespace whistle

template <typename Tag>
struct std::hash<whistle::StrongId<Tag>> {
  std::size_t operator()(const whistle::StrongId<Tag>& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
