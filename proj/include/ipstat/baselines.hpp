#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"
#include "ipstat/memory_block.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/topk_heap.hpp"

namespace ipstat {

/// Hash-map baseline: address word -> count, then a top-k heap over all
/// pairs. Also serves as the recount oracle for generated datasets.
class HashCounter {
 public:
  struct Stats {
    std::uint64_t records_ingested = 0;
    std::uint64_t distinct = 0;
    std::uint64_t tracked_bytes = 0;
  };

  // next pointer plus the stored key/value pair
  static constexpr std::uint64_t kNodeBytes =
      sizeof(void*) + sizeof(std::pair<const std::uint32_t, std::uint64_t>);

  void ingest(IpV4Address addr) {
    ++table_[to_u32(addr)];
    ++records_;
  }

  template <RecordSource S>
  void ingest_all(S& source) {
    source.for_each([this](IpV4Address addr) { ingest(addr); });
  }

  std::uint64_t count(IpV4Address addr) const {
    const auto it = table_.find(to_u32(addr));
    return it == table_.end() ? 0 : it->second;
  }

  template <class F>
  void for_each_count(F&& fn) const {
    for (const auto& [word, n] : table_) fn(from_u32(word), n);
  }

  std::vector<HeapEntry> top_k(std::size_t k) const {
    TopKHeap heap(k);
    for (const auto& [word, n] : table_) heap.offer(from_u32(word), n);
    return heap.drain_sorted();
  }

  /// All (address, count) pairs in ranking order.
  std::vector<HeapEntry> sorted_counts() const {
    std::vector<HeapEntry> out;
    out.reserve(table_.size());
    for (const auto& [word, n] : table_) out.push_back({from_u32(word), n});
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
  }

  Stats stats() const noexcept {
    return {records_, table_.size(),
            table_.bucket_count() * sizeof(void*) + table_.size() * kNodeBytes};
  }

 private:
  std::unordered_map<std::uint32_t, std::uint64_t> table_;
  std::uint64_t records_ = 0;
};

/// Direct-indexed baseline: one 256^3-slot array per first octet, reserved
/// on first sight of that octet. Top-k is taken per subset and the q x k
/// candidates are merged through one final heap.
class IpMapCounter {
 public:
  static constexpr std::size_t kSubsetSlots = 256u * 256u * 256u;
  static constexpr std::uint64_t kSubsetBytes = kSubsetSlots * sizeof(std::uint64_t);

  struct Stats {
    std::uint64_t records_ingested = 0;
    std::uint64_t subsets = 0;
    std::uint64_t tracked_bytes = 0;
  };

  static constexpr std::uint32_t element_index(std::uint8_t b, std::uint8_t c,
                                               std::uint8_t d) noexcept {
    return std::uint32_t{b} * 65536 + std::uint32_t{c} * 256 + d;
  }

  void ingest(IpV4Address addr) {
    auto& array = subsets_[addr.a];
    if (!array) {
      array.emplace(kSubsetSlots);
      ++allocated_;
    }
    ++(*array)[element_index(addr.b, addr.c, addr.d)];
    ++records_;
  }

  template <RecordSource S>
  void ingest_all(S& source) {
    source.for_each([this](IpV4Address addr) { ingest(addr); });
  }

  std::uint64_t count(IpV4Address addr) const noexcept {
    const auto& array = subsets_[addr.a];
    return array ? (*array)[element_index(addr.b, addr.c, addr.d)] : 0;
  }

  bool has_subset(std::uint8_t octet) const noexcept { return subsets_[octet].has_value(); }

  /// Best k within one first-octet subset.
  std::vector<HeapEntry> subset_top_k(std::uint8_t octet, std::size_t k) const {
    TopKHeap heap(k);
    const auto& array = subsets_[octet];
    if (array) {
      const auto counts = array->slots();
      for (std::uint32_t p = 0; p < kSubsetSlots; ++p) {
        if (counts[p] != 0) {
          heap.offer(IpV4Address{octet, static_cast<std::uint8_t>(p >> 16),
                                 static_cast<std::uint8_t>(p >> 8), static_cast<std::uint8_t>(p)},
                     counts[p]);
        }
      }
    }
    return heap.drain_sorted();
  }

  std::vector<HeapEntry> top_k(std::size_t k) const {
    std::vector<std::vector<HeapEntry>> candidates;
    for (unsigned octet = 0; octet < 256; ++octet) {
      if (subsets_[octet]) candidates.push_back(subset_top_k(static_cast<std::uint8_t>(octet), k));
    }
    return merge_top_k(candidates, k);
  }

  Stats stats() const noexcept { return {records_, allocated_, allocated_ * kSubsetBytes}; }

 private:
  std::array<std::optional<ZeroedSlots>, 256> subsets_;
  std::uint64_t allocated_ = 0;
  std::uint64_t records_ = 0;
};

template <RecordSource S>
std::vector<HeapEntry> hash_top_k(S& source, std::size_t k) {
  require_k(k);
  HashCounter counter;
  counter.ingest_all(source);
  return counter.top_k(k);
}

template <RecordSource S>
std::vector<HeapEntry> ipmap_top_k(S& source, std::size_t k) {
  require_k(k);
  IpMapCounter counter;
  counter.ingest_all(source);
  return counter.top_k(k);
}

}  // namespace ipstat
