#include "whistle/assignment.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace whistle {

bool Assignment::contains(ServiceId service, EdgeId edge) const {
  return pairs_.contains({service, edge});
}

void Assignment::add(const Placement& placement) {
  auto [it, inserted] = pairs_.insert_or_assign({placement.service, placement.edge}, placement);
  if (inserted) {
    ++per_edge_[placement.edge];
    ++per_service_[placement.service];
  }
}

bool Assignment::remove(ServiceId service, EdgeId edge) {
  if (pairs_.erase({service, edge}) == 0) return false;
  if (--per_edge_[edge] == 0) per_edge_.erase(edge);
  if (--per_service_[service] == 0) per_service_.erase(service);
  return true;
}

std::size_t Assignment::hosted_count(EdgeId edge) const {
  auto it = per_edge_.find(edge);
  return it == per_edge_.end() ? 0 : it->second;
}

std::size_t Assignment::replica_count(ServiceId service) const {
  auto it = per_service_.find(service);
  return it == per_service_.end() ? 0 : it->second;
}

std::vector<EdgeId> Assignment::edges_of(ServiceId service) const {
  std::vector<EdgeId> out;
  for (auto it = pairs_.lower_bound({service, EdgeId{0}});
       it != pairs_.end() && it->first.first == service; ++it) {
    out.push_back(it->first.second);
  }
  return out;
}

std::vector<ServiceId> Assignment::services_at(EdgeId edge) const {
  std::vector<ServiceId> out;
  for (const auto& [key, p] : pairs_) {
    if (key.second == edge) out.push_back(key.first);
  }
  return out;
}

std::vector<Assignment::Key> Assignment::keys() const {
  std::vector<Key> out;
  out.reserve(pairs_.size());
  for (const auto& [key, p] : pairs_) out.push_back(key);
  return out;
}

std::vector<Assignment::Key> evict_services(const Assignment& previous, const Assignment& next) {
  std::vector<Assignment::Key> out;
  for (const auto& [key, p] : previous.placements()) {
    if (!next.contains(key.first, key.second)) out.push_back(key);
  }
  return out;
}

void write_assignment_csv(std::ostream& out, const Assignment& assignment) {
  out << "service_id,edge_id,theta,phi,stage\n";
  std::ostringstream line;
  line << std::fixed << std::setprecision(6);
  for (const auto& [key, p] : assignment.placements()) {
    line.str({});
    line << key.first.value << ',' << key.second.value << ',' << p.theta << ',' << p.phi << ','
         << p.stage << '\n';
    out << line.str();
  }
}

std::string format_pairs(const std::vector<Assignment::Key>& pairs) {
  std::string out;
  for (const auto& [s, e] : pairs) {
    if (!out.empty()) out += ';';
    out += std::to_string(s.value) + '@' + std::to_string(e.value);
  }
  return out;
}

}  // namespace whistle
