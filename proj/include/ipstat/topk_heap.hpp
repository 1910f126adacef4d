#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"

namespace ipstat {

struct HeapEntry {
  IpV4Address address;
  std::uint64_t count = 0;

  friend constexpr bool operator==(const HeapEntry&, const HeapEntry&) = default;
};

inline void require_k(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
}

/// The ranking used everywhere results are ordered: higher count first,
/// equal counts broken by the numerically smaller address.
constexpr bool ranks_before(const HeapEntry& x, const HeapEntry& y) noexcept {
  if (x.count != y.count) return x.count > y.count;
  return to_u32(x.address) < to_u32(y.address);
}

/// Bounded min-heap keeping the k best entries under ranks_before(). The
/// root is the worst retained entry, so a new offer only has to beat it.
/// Capacity 1 degenerates to a running maximum.
class TopKHeap {
 public:
  explicit TopKHeap(std::size_t capacity) : capacity_(capacity) {
    require_k(capacity_);
    entries_.reserve(capacity_);
  }

  void offer(const HeapEntry& entry) {
    if (entry.count == 0) return;
    if (entries_.size() < capacity_) {
      entries_.push_back(entry);
      std::push_heap(entries_.begin(), entries_.end(), ranks_before);
    } else if (ranks_before(entry, entries_.front())) {
      std::pop_heap(entries_.begin(), entries_.end(), ranks_before);
      entries_.back() = entry;
      std::push_heap(entries_.begin(), entries_.end(), ranks_before);
    }
  }

  void offer(IpV4Address address, std::uint64_t count) { offer(HeapEntry{address, count}); }

  /// Entries best-first; the heap is left empty.
  std::vector<HeapEntry> drain_sorted() {
    std::sort_heap(entries_.begin(), entries_.end(), ranks_before);
    std::vector<HeapEntry> out = std::move(entries_);
    entries_ = {};
    entries_.reserve(capacity_);
    return out;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return entries_.empty(); }
  /// Worst retained entry. Precondition: !empty().
  const HeapEntry& root() const noexcept { return entries_.front(); }
  std::span<const HeapEntry> entries() const noexcept { return entries_; }
  std::uint64_t tracked_bytes() const noexcept { return capacity_ * sizeof(HeapEntry); }

 private:
  std::size_t capacity_;
  std::vector<HeapEntry> entries_;
};

/// Global top-k from per-partition candidate lists. Exact when the
/// partitions are disjoint and each list is its partition's own top-k.
inline std::vector<HeapEntry> merge_top_k(std::span<const std::vector<HeapEntry>> candidates,
                                          std::size_t k) {
  TopKHeap heap(k);
  for (const auto& list : candidates) {
    for (const auto& entry : list) heap.offer(entry);
  }
  return heap.drain_sorted();
}

}  // namespace ipstat
