#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "whistle/types.hpp"

namespace whistle {

/// One hosted (service, edge) pair with the utilities seen when the edge
/// accepted it. `stage` is 1 or 2 for matching output, 0 for other schemes.
struct Placement {
  ServiceId service{};
  EdgeId edge{};
  double theta{0.0};
  double phi{0.0};
  int stage{0};
};

/// Service-to-edge placement. Each pair is stored once, so the matching
/// function is symmetric by construction.
class Assignment {
 public:
  using Key = std::pair<ServiceId, EdgeId>;

  bool contains(ServiceId service, EdgeId edge) const;
  bool hosts(EdgeId edge, ServiceId service) const { return contains(service, edge); }

  /// Adds or replaces the pair.
  void add(const Placement& placement);
  void add(ServiceId service, EdgeId edge) { add(Placement{service, edge}); }
  bool remove(ServiceId service, EdgeId edge);

  std::size_t hosted_count(EdgeId edge) const;
  std::size_t replica_count(ServiceId service) const;
  std::vector<EdgeId> edges_of(ServiceId service) const;
  std::vector<ServiceId> services_at(EdgeId edge) const;

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::map<Key, Placement>& placements() const noexcept { return pairs_; }

  /// Sorted (service, edge) pairs.
  std::vector<Key> keys() const;

  bool operator==(const Assignment& other) const { return keys() == other.keys(); }

 private:
  std::map<Key, Placement> pairs_;
  std::map<EdgeId, std::size_t> per_edge_;
  std::map<ServiceId, std::size_t> per_service_;
};

/// Pairs present in `previous` but absent from `next`.
std::vector<Assignment::Key> evict_services(const Assignment& previous, const Assignment& next);

/// CSV with columns service_id,edge_id,theta,phi,stage in pair order.
void write_assignment_csv(std::ostream& out, const Assignment& assignment);

/// Compact "s@e;s@e" rendering used in window records.
std::string format_pairs(const std::vector<Assignment::Key>& pairs);

}  // namespace whistle
