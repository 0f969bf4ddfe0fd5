#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "whistle/types.hpp"

namespace whistle {

struct ReuseEntry {
  InputDescriptor key;
  ServiceId service{};
  double output_size{0.0};
  double complexity_saved{0.0};
  std::uint64_t frequency{1};
  double inserted_at{0.0};
};

enum class LookupKind { Full, Partial, Miss };

const char* to_string(LookupKind kind) noexcept;

struct LookupOutcome {
  LookupKind kind{LookupKind::Miss};
  double overlap{0.0};
  double residual_complexity{0.0};
};

/// Bounded per-edge store of computed results with least-frequently-used
/// eviction. Frequencies persist across windows; hit counters are per window.
class ReuseTable {
 public:
  explicit ReuseTable(std::size_t capacity = 1024);

  /// Full hit on an identical descriptor for the service, otherwise a partial
  /// hit on the longest common digest prefix with any entry of the service,
  /// otherwise a miss. Hits bump the matched entry's frequency; a miss leaves
  /// the table untouched.
  LookupOutcome lookup(ServiceId service, const InputDescriptor& input, double complexity);

  /// Stores the entry with frequency 1. When full, first removes and returns
  /// the minimum-frequency entry (oldest insertion on ties). Throws
  /// ContractError if the key is already present or the descriptor is empty.
  std::optional<ReuseEntry> insert(ReuseEntry entry);

  bool contains(ServiceId service, const InputDescriptor& input) const;
  const ReuseEntry* find(ServiceId service, const InputDescriptor& input) const;

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

  /// Entries ordered by (service, key).
  std::vector<ReuseEntry> snapshot() const;

  double window_full_hits() const noexcept { return window_full_hits_; }
  double window_partial_weight() const noexcept { return window_partial_weight_; }
  void reset_window_counters() noexcept;

 private:
  using Key = std::pair<ServiceId, InputDescriptor>;
  // (frequency, inserted_at, insertion sequence): the set's first element is
  // the next eviction victim.
  using Rank = std::tuple<std::uint64_t, double, std::uint64_t>;

  struct Slot {
    ReuseEntry entry;
    std::uint64_t sequence{0};
  };

  Rank rank_of(const Slot& slot) const;
  void bump(std::map<Key, Slot>::iterator it);

  std::size_t capacity_;
  std::uint64_t next_sequence_{0};
  std::map<Key, Slot> entries_;
  std::set<Rank> order_;
  std::map<std::uint64_t, std::map<Key, Slot>::iterator> by_sequence_;
  double window_full_hits_{0.0};
  double window_partial_weight_{0.0};
};

/// (Full hits + overlap-weighted partial hits) / received tasks for the
/// current window; 0 when nothing was received.
double reuse_ratio(const ReuseTable& table, std::size_t received_count);

/// CSV dump with columns service,key_digest,frequency.
void write_reuse_table_csv(std::ostream& out, const ReuseTable& table);

}  // namespace whistle
