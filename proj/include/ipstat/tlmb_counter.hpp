#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"
#include "ipstat/memory_block.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/topk_heap.hpp"

namespace ipstat {

/// Two-layer memory-block counter.
///
/// The first layer is one contiguous reservation of 256 x 256 memory blocks:
/// octets (a, b) select a block and octet c selects a slot in it. A slot
/// holds the handle of a second-layer block, allocated the first time its
/// /24 prefix is seen, whose slot d holds the occurrence count of a.b.c.d.
/// An all-zero handle means no second-layer block exists yet.
///
/// A counter may be narrowed to a contiguous range of first octets (used by
/// the prefix-bit parallel scheme); its first layer then shrinks to
/// span x 256 blocks.
class TlmbCounter {
 public:
  static constexpr std::uint64_t kFirstLayerBytes = 256ull * 256 * sizeof(MemoryBlock);
  static constexpr std::uint64_t kSecondBlockBytes = sizeof(MemoryBlock);

  struct Stats {
    std::uint64_t records_ingested = 0;
    std::uint64_t allocated_second_blocks = 0;
    std::uint64_t first_layer_bytes = 0;
    std::uint64_t tracked_bytes = 0;
  };

  explicit TlmbCounter(std::uint8_t first_octet_base = 0, unsigned first_octet_span = 256)
      : base_(first_octet_base), span_(first_octet_span) {
    if (span_ == 0 || base_ + span_ > 256) {
      throw Error(ErrorCode::InvalidArgument,
                  "first-octet range [" + std::to_string(base_) + ", " +
                      std::to_string(base_ + span_) + ") is outside [0, 256)");
    }
    first_layer_ = ZeroedSlots(std::size_t{span_} * 256 * kBlockSlots);
  }

  /// First-layer block ordinal for octets (a, b): a * 256 + b.
  static constexpr std::uint32_t block_index(std::uint8_t a, std::uint8_t b) noexcept {
    return std::uint32_t{a} * 256 + b;
  }

  void ingest(IpV4Address addr) {
    if (finalized_) throw Error(ErrorCode::CounterFinalized, "ingest after finalize()");
    const unsigned local_a = unsigned{addr.a} - base_;
    if (local_a >= span_) {
      throw Error(ErrorCode::InvalidArgument,
                  format(addr) + " is outside this counter's first-octet range");
    }
    const std::uint32_t slot =
        block_index(static_cast<std::uint8_t>(local_a), addr.b) * kBlockSlots + addr.c;
    std::uint64_t& handle = first_layer_[slot];
    if (handle == BlockPool::kNone) {
      handle = pool_.acquire();
      occupied_.push_back(slot);
    }
    std::uint64_t& count = pool_.at(handle)[addr.d];
#ifndef NDEBUG
    if (count == UINT64_MAX) throw Error(ErrorCode::CountOverflow, format(addr));
#endif
    ++count;
    ++records_;
  }

  template <RecordSource S>
  void ingest_all(S& source) {
    source.for_each([this](IpV4Address addr) { ingest(addr); });
  }

  std::uint64_t count(IpV4Address addr) const noexcept {
    const unsigned local_a = unsigned{addr.a} - base_;
    if (local_a >= span_) return 0;
    const std::uint64_t handle =
        first_layer_[block_index(static_cast<std::uint8_t>(local_a), addr.b) * kBlockSlots + addr.c];
    return handle == BlockPool::kNone ? 0 : pool_.at(handle)[addr.d];
  }

  /// Calls fn(address, count) for every non-zero count, in ascending address
  /// order: second-layer blocks by (block, slot) position, then slot d.
  template <class F>
  void for_each_count(F&& fn) const {
    std::vector<std::uint32_t> slots = occupied_;
    std::sort(slots.begin(), slots.end());
    for (const std::uint32_t slot : slots) {
      const MemoryBlock& block = pool_.at(first_layer_[slot]);
      const auto a = static_cast<std::uint8_t>(base_ + (slot >> 16));
      const auto b = static_cast<std::uint8_t>(slot >> 8);
      const auto c = static_cast<std::uint8_t>(slot);
      for (unsigned d = 0; d < kBlockSlots; ++d) {
        if (block[d] != 0) fn(IpV4Address{a, b, c, static_cast<std::uint8_t>(d)}, block[d]);
      }
    }
  }

  /// Best k entries; the counter stays queryable.
  std::vector<HeapEntry> top_k(std::size_t k) const {
    TopKHeap heap(k);
    for_each_count([&](IpV4Address addr, std::uint64_t n) { heap.offer(addr, n); });
    return heap.drain_sorted();
  }

  Stats stats() const noexcept {
    Stats s;
    s.records_ingested = records_;
    s.allocated_second_blocks = pool_.live();
    s.first_layer_bytes = first_layer_.bytes();
    s.tracked_bytes = s.first_layer_bytes + s.allocated_second_blocks * kSecondBlockBytes;
    return s;
  }

  /// Rejects further ingest; reads keep working.
  void finalize() noexcept { finalized_ = true; }
  bool finalized() const noexcept { return finalized_; }

  /// Forgets all counts. Second-layer blocks go back to the pool and are
  /// zero-filled when handed out again.
  void reset() {
    for (const std::uint32_t slot : occupied_) first_layer_[slot] = BlockPool::kNone;
    occupied_.clear();
    pool_.release_all();
    records_ = 0;
    finalized_ = false;
  }

  std::uint8_t first_octet_base() const noexcept { return base_; }
  unsigned first_octet_span() const noexcept { return span_; }

 private:
  std::uint8_t base_;
  unsigned span_;
  ZeroedSlots first_layer_;
  BlockPool pool_;
  std::vector<std::uint32_t> occupied_;
  std::uint64_t records_ = 0;
  bool finalized_ = false;
};

template <RecordSource S>
std::vector<HeapEntry> tlmb_top_k(S& source, std::size_t k) {
  require_k(k);
  TlmbCounter counter;
  counter.ingest_all(source);
  return counter.top_k(k);
}

}  // namespace ipstat
