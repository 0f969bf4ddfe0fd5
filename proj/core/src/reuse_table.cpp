#include "whistle/reuse_table.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "whistle/errors.hpp"

namespace whistle {

namespace {

std::size_t common_prefix(const InputDescriptor& a, const InputDescriptor& b) {
  const auto [ia, ib] = std::mismatch(a.items.begin(), a.items.end(), b.items.begin(), b.items.end());
  return static_cast<std::size_t>(ia - a.items.begin());
}

}  // namespace

const char* to_string(LookupKind kind) noexcept {
  switch (kind) {
    case LookupKind::Full: return "full";
    case LookupKind::Partial: return "partial";
    case LookupKind::Miss: return "miss";
  }
  return "?";
}

ReuseTable::ReuseTable(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ContractError("reuse table capacity must be at least 1");
}

ReuseTable::Rank ReuseTable::rank_of(const Slot& slot) const {
  return {slot.entry.frequency, slot.entry.inserted_at, slot.sequence};
}

void ReuseTable::bump(std::map<Key, Slot>::iterator it) {
  order_.erase(rank_of(it->second));
  ++it->second.entry.frequency;
  order_.insert(rank_of(it->second));
}

LookupOutcome ReuseTable::lookup(ServiceId service, const InputDescriptor& input,
                                 double complexity) {
  if (input.empty()) throw ContractError("lookup with an empty input descriptor");

  const Key key{service, input};
  auto exact = entries_.find(key);
  if (exact != entries_.end()) {
    bump(exact);
    window_full_hits_ += 1.0;
    return {LookupKind::Full, 1.0, 0.0};
  }

  // In lexicographic order the longest common prefix with any stored key is
  // attained by one of the two neighbours of the query.
  auto succ = entries_.lower_bound(key);
  std::size_t best = 0;
  if (succ != entries_.end() && succ->first.first == service) {
    best = common_prefix(input, succ->first.second);
  }
  if (succ != entries_.begin()) {
    auto pred = std::prev(succ);
    if (pred->first.first == service) best = std::max(best, common_prefix(input, pred->first.second));
  }
  if (best == 0) return {LookupKind::Miss, 0.0, complexity};

  // Smallest stored key sharing that prefix is the matched entry.
  InputDescriptor prefix;
  prefix.items.assign(input.items.begin(), input.items.begin() + static_cast<std::ptrdiff_t>(best));
  auto matched = entries_.lower_bound({service, prefix});
  const std::size_t longest = std::max(input.size(), matched->first.second.size());
  // A query that is a strict prefix of a stored key is still not identical.
  const double overlap = static_cast<double>(best) /
                         static_cast<double>(best == input.size() ? longest : input.size());
  bump(matched);
  window_partial_weight_ += overlap;
  return {LookupKind::Partial, overlap, (1.0 - overlap) * complexity};
}

std::optional<ReuseEntry> ReuseTable::insert(ReuseEntry entry) {
  if (entry.key.empty()) throw ContractError("insert with an empty input descriptor");
  Key key{entry.service, entry.key};
  if (entries_.contains(key)) throw ContractError("duplicate reuse table insert");

  std::optional<ReuseEntry> evicted;
  if (entries_.size() >= capacity_) {
    const Rank victim = *order_.begin();
    auto it = by_sequence_.at(std::get<2>(victim));
    evicted = it->second.entry;
    order_.erase(order_.begin());
    by_sequence_.erase(std::get<2>(victim));
    entries_.erase(it);
  }

  entry.frequency = 1;
  Slot slot{std::move(entry), next_sequence_++};
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(slot));
  order_.insert(rank_of(it->second));
  by_sequence_.emplace(it->second.sequence, it);
  return evicted;
}

bool ReuseTable::contains(ServiceId service, const InputDescriptor& input) const {
  return entries_.contains({service, input});
}

const ReuseEntry* ReuseTable::find(ServiceId service, const InputDescriptor& input) const {
  auto it = entries_.find({service, input});
  return it == entries_.end() ? nullptr : &it->second.entry;
}

std::vector<ReuseEntry> ReuseTable::snapshot() const {
  std::vector<ReuseEntry> out;
  out.reserve(entries_.size());
  for (const auto& [key, slot] : entries_) out.push_back(slot.entry);
  return out;
}

void ReuseTable::reset_window_counters() noexcept {
  window_full_hits_ = 0.0;
  window_partial_weight_ = 0.0;
}

double reuse_ratio(const ReuseTable& table, std::size_t received_count) {
  if (received_count == 0) return 0.0;
  return (table.window_full_hits() + table.window_partial_weight()) /
         static_cast<double>(received_count);
}

void write_reuse_table_csv(std::ostream& out, const ReuseTable& table) {
  out << "service,key_digest,frequency\n";
  char digest[17];
  for (const auto& e : table.snapshot()) {
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(fingerprint(e.key)));
    out << e.service.value << ',' << digest << ',' << e.frequency << '\n';
  }
}

}  // namespace whistle
