#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "derived.hpp"
#include "naive_lfu.hpp"
#include "whistle/errors.hpp"
#include "whistle/reuse_table.hpp"

namespace whistle {
namespace {

using testing::derived;

InputDescriptor key(std::vector<Digest> items) { return InputDescriptor{std::move(items)}; }

ReuseEntry entry(std::uint32_t service, std::vector<Digest> items, double at = 0.0) {
  ReuseEntry e;
  e.key = key(std::move(items));
  e.service = ServiceId{service};
  e.inserted_at = at;
  return e;
}

TEST(ReuseLookup, FullPartialMiss) {
  ReuseTable table(4);
  EXPECT_EQ(table.lookup(ServiceId{1}, key({1, 2}), 100).kind, LookupKind::Miss);
  EXPECT_EQ(table.lookup(ServiceId{1}, key({1, 2}), 100).residual_complexity, 100);

  table.insert(entry(1, {10, 11, 12, 13}));
  auto full = table.lookup(ServiceId{1}, key({10, 11, 12, 13}), 100);
  EXPECT_EQ(full.kind, LookupKind::Full);
  EXPECT_EQ(full.overlap, 1.0);
  EXPECT_EQ(full.residual_complexity, 0.0);

  auto partial = table.lookup(ServiceId{1}, key({10, 11, 98, 99}), 100);
  EXPECT_EQ(partial.kind, LookupKind::Partial);
  EXPECT_NEAR(partial.overlap, derived("partial_overlap_2_of_4"), 1e-12);
  EXPECT_NEAR(partial.residual_complexity, derived("partial_residual_2_of_4"), 1e-12);

  // Entries of another service never match.
  EXPECT_EQ(table.lookup(ServiceId{2}, key({10, 11, 12, 13}), 100).kind, LookupKind::Miss);
}

TEST(ReuseLookup, HitsBumpFrequency) {
  ReuseTable table(4);
  table.insert(entry(1, {1, 2}));
  table.lookup(ServiceId{1}, key({1, 2}), 1);
  table.lookup(ServiceId{1}, key({1, 7}), 1);
  EXPECT_EQ(table.find(ServiceId{1}, key({1, 2}))->frequency, 3u);
  table.lookup(ServiceId{1}, key({5}), 1);
  EXPECT_EQ(table.find(ServiceId{1}, key({1, 2}))->frequency, 3u);
}

TEST(ReuseInsert, EvictsFrequencyTwoOfFiveTwoNine) {
  ReuseTable table(3);
  const std::vector<std::pair<Digest, int>> freq{{1, 5}, {2, 2}, {3, 9}};
  for (const auto& [d, f] : freq) {
    table.insert(entry(1, {d}, static_cast<double>(d)));
    for (int i = 1; i < f; ++i) table.lookup(ServiceId{1}, key({d}), 1);
  }
  auto evicted = table.insert(entry(1, {4}, 10));
  ASSERT_TRUE(evicted);
  EXPECT_EQ(evicted->frequency, 2u);
  EXPECT_EQ(evicted->key, key({2}));
  EXPECT_EQ(table.size(), 3u);
}

TEST(ReuseInsert, TieEvictsOldestInsertion) {
  ReuseTable table(2);
  table.insert(entry(1, {7}, 7.0));
  table.insert(entry(1, {1}, 1.0));
  table.lookup(ServiceId{1}, key({7}), 1);
  table.lookup(ServiceId{1}, key({1}), 1);
  auto evicted = table.insert(entry(1, {9}, 9.0));
  ASSERT_TRUE(evicted);
  EXPECT_EQ(evicted->inserted_at, 1.0);
}

TEST(ReuseInsert, ContractErrors) {
  ReuseTable table(2);
  table.insert(entry(1, {1}));
  EXPECT_THROW(table.insert(entry(1, {1})), ContractError);
  EXPECT_THROW(table.insert(entry(1, {})), ContractError);
  EXPECT_FALSE(table.insert(entry(2, {1})));
  EXPECT_THROW(ReuseTable(0), ContractError);
}

TEST(ReuseRatio, WeightedByOverlap) {
  ReuseTable table(8);
  EXPECT_EQ(reuse_ratio(table, 0), 0.0);
  table.insert(entry(1, {1, 2, 3, 4}));
  for (int i = 0; i < 7; ++i) table.lookup(ServiceId{1}, key({1, 2, 3, 4}), 1);
  EXPECT_NEAR(reuse_ratio(table, 10), derived("reuse_ratio_7_of_10"), 1e-12);

  table.reset_window_counters();
  table.lookup(ServiceId{1}, key({1, 2, 9, 9}), 1);
  table.lookup(ServiceId{1}, key({1, 2, 8, 8}), 1);
  EXPECT_NEAR(reuse_ratio(table, 4), derived("reuse_ratio_partial"), 1e-12);
}

TEST(ReuseTableCsv, OneRowPerEntry) {
  ReuseTable table(4);
  table.insert(entry(2, {1}));
  table.insert(entry(1, {1}));
  std::ostringstream out;
  write_reuse_table_csv(out, table);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.rfind("service,key_digest,frequency\n1,", 0), 0u);
}

TEST(ReuseProperty, AgreesWithNaiveReference) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t capacity = 4 + seed * 3;
    ReuseTable table(capacity);
    testing::NaiveLfu naive(capacity);
    std::uniform_int_distribution<int> service(1, 2), len(1, 4), digit(0, 3), op(0, 2);
    for (int step = 0; step < 10'000; ++step) {
      const ServiceId s{static_cast<std::uint32_t>(service(rng))};
      InputDescriptor q;
      for (int i = len(rng); i > 0; --i) q.items.push_back(static_cast<Digest>(digit(rng)));
      if (op(rng) == 0) {
        const auto a = table.lookup(s, q, 10.0);
        const auto b = naive.lookup(s, q, 10.0);
        ASSERT_EQ(a.kind, b.kind) << "step " << step;
        ASSERT_DOUBLE_EQ(a.overlap, b.overlap);
        ASSERT_DOUBLE_EQ(a.residual_complexity, b.residual_complexity);
      } else if (!table.contains(s, q)) {
        ASSERT_FALSE(naive.contains(s, q));
        const std::uint64_t min_before = naive.min_frequency();
        const double at = static_cast<double>(step / 7);  // coarse clock forces ties
        ReuseEntry e;
        e.key = q;
        e.service = s;
        e.inserted_at = at;
        const auto evicted = table.insert(e);
        const auto naive_victim = naive.insert(s, q, at);
        ASSERT_EQ(evicted.has_value(), naive_victim.has_value()) << "step " << step;
        if (evicted) {
          ASSERT_EQ(evicted->frequency, min_before);
        }
      }
      ASSERT_EQ(table.size(), naive.size());
      ASSERT_LE(table.size(), capacity);
    }
    for (const auto& e : table.snapshot()) ASSERT_TRUE(naive.contains(e.service, e.key));
  }
}

}  // namespace
}  // namespace whistle
