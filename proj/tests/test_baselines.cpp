#include <gtest/gtest.h>

#include <vector>

#include "ipstat/baselines.hpp"
#include "ipstat/ssmb_counter.hpp"
#include "ipstat/tlmb_counter.hpp"
#include "support/oracle.hpp"
#include "support/property.hpp"

using namespace ipstat;
using ipstat::testing::for_all;
using ipstat::testing::oracle_top_k;
using ipstat::testing::random_records;
using ipstat::testing::Rng;
using ipstat::testing::uniform;

TEST(HashCounter, Basic) {
  const IpV4Address a{1, 1, 1, 1}, b{2, 2, 2, 2};
  std::vector<IpV4Address> records{a, b, a, a};
  MemorySource source(records);
  EXPECT_EQ(hash_top_k(source, 1), (std::vector<HeapEntry>{{a, 3}}));
}

TEST(HashCounter, EmptyInput) {
  std::vector<IpV4Address> none;
  MemorySource source(none);
  EXPECT_TRUE(hash_top_k(source, 10).empty());
}

TEST(HashCounter, StatsAndConservation) {
  Rng rng(21);
  const auto records = random_records(rng, {5000, 400, 256, false});
  HashCounter counter;
  for (const auto& a : records) counter.ingest(a);
  std::uint64_t total = 0;
  counter.for_each_count([&](IpV4Address, std::uint64_t n) { total += n; });
  EXPECT_EQ(total, records.size());
  EXPECT_EQ(counter.stats().records_ingested, records.size());
  EXPECT_EQ(counter.stats().distinct, ipstat::testing::oracle_counts(records).size());
  EXPECT_GT(counter.stats().tracked_bytes, counter.stats().distinct * HashCounter::kNodeBytes);
  EXPECT_EQ(counter.sorted_counts(), ipstat::testing::oracle_sorted(records));
}

TEST(IpMapCounter, TrackedBytesPerFirstOctet) {
  IpMapCounter counter;
  EXPECT_EQ(counter.stats().tracked_bytes, 0u);
  counter.ingest({10, 1, 2, 3});
  counter.ingest({192, 168, 0, 1});
  counter.ingest({10, 4, 5, 6});
  EXPECT_EQ(counter.stats().tracked_bytes, 268435456u);
  EXPECT_EQ(counter.stats().subsets, 2u);
  EXPECT_TRUE(counter.has_subset(10));
  EXPECT_FALSE(counter.has_subset(11));
}

TEST(IpMapCounter, TopOne) {
  std::vector<IpV4Address> records;
  records.insert(records.end(), 3, IpV4Address{10, 0, 0, 1});
  records.insert(records.end(), 5, IpV4Address{20, 0, 0, 2});
  MemorySource source(records);
  EXPECT_EQ(ipmap_top_k(source, 1), (std::vector<HeapEntry>{{{20, 0, 0, 2}, 5}}));
}

TEST(IpMapCounter, SubsetTopKStaysInSubset) {
  IpMapCounter counter;
  counter.ingest({1, 0, 0, 1});
  counter.ingest({2, 0, 0, 1});
  counter.ingest({2, 0, 0, 1});
  const auto top = counter.subset_top_k(1, 5);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].address.a, 1);
  EXPECT_TRUE(counter.subset_top_k(3, 5).empty());
}

TEST(BaselineProperties, AllFourMethodsAgree) {
  SsmbCounter ssmb;
  auto result = for_all(25, 22, [&](Rng& rng) -> std::optional<std::string> {
    const auto records = random_records(
        rng, {static_cast<std::size_t>(uniform(rng, 0, 30000)), static_cast<std::size_t>(uniform(rng, 1, 2000)),
              static_cast<unsigned>(uniform(rng, 1, 3)), rng() % 2 == 0});
    const std::size_t k = std::vector<std::size_t>{1, 10, 100}[uniform(rng, 0, 2)];
    MemorySource source(records);
    const auto expected = oracle_top_k(records, k);
    if (hash_top_k(source, k) != expected) return "hash";
    if (ipmap_top_k(source, k) != expected) return "ipmap";
    if (tlmb_top_k(source, k) != expected) return "tlmb";
    if (ssmb.top_k(source, k) != expected) return "ssmb";
    return std::nullopt;
  });
  EXPECT_TRUE(result) << *result.failure;
}
