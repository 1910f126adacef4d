#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"
#include "ipstat/memory_block.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/topk_heap.hpp"

namespace ipstat {

/// Single shared memory-block counter.
///
/// Records are split into subsets by first octet. One block of 256^3 slots
/// is reused for every subset: zero it, replay the source counting only
/// that subset's records at element_index(b, c, d), then sweep the non-zero
/// slots into one top-k heap shared by all subsets. Memory is fixed at
/// 128 MiB regardless of input; the price is one source pass per subset.
class SsmbCounter {
 public:
  static constexpr std::size_t kSharedSlots = 256u * 256u * 256u;
  static constexpr std::uint64_t kSharedBlockBytes = kSharedSlots * sizeof(std::uint64_t);

  struct Stats {
    std::uint64_t records_ingested = 0;
    std::uint64_t subsets = 0;  // q
    std::uint64_t subset_passes = 0;
    std::uint64_t discovery_passes = 0;
    std::uint64_t tracked_bytes = 0;
  };

  /// Observers called with the subset octet and the shared block, right
  /// after zero-fill (begin) and right after counting (end) of each pass.
  struct PassHooks {
    std::function<void(std::uint8_t, std::span<const std::uint64_t>)> on_pass_begin;
    std::function<void(std::uint8_t, std::span<const std::uint64_t>)> on_pass_end;
  };

  SsmbCounter() : block_(kSharedSlots) {}

  static constexpr std::uint32_t element_index(std::uint8_t b, std::uint8_t c,
                                               std::uint8_t d) noexcept {
    return std::uint32_t{b} * 65536 + std::uint32_t{c} * 256 + d;
  }

  void set_hooks(PassHooks hooks) { hooks_ = std::move(hooks); }

  /// Discovers the subsets with one pass, then runs one counting pass per
  /// subset in ascending octet order.
  template <RecordSource S>
  std::vector<HeapEntry> top_k(S& source, std::size_t k) {
    TopKHeap heap(k);
    require_replayable(source);
    stats_ = {};
    const std::vector<std::uint8_t> octets = first_octets_present(source);
    stats_.discovery_passes = 1;
    count_subsets(source, octets, heap);
    return heap.drain_sorted();
  }

  /// Counting passes for the given subsets only, offering into `heap`.
  /// Accumulates into stats().
  template <RecordSource S>
  void count_subsets(S& source, std::span<const std::uint8_t> octets, TopKHeap& heap) {
    require_replayable(source);
    auto counts = block_.slots();
    for (const std::uint8_t octet : octets) {
      block_.clear();
      if (hooks_.on_pass_begin) hooks_.on_pass_begin(octet, counts);
      std::uint64_t matched = 0;
      source.for_each([&](IpV4Address addr) {
        if (addr.a == octet) {
          ++counts[element_index(addr.b, addr.c, addr.d)];
          ++matched;
        }
      });
      if (hooks_.on_pass_end) hooks_.on_pass_end(octet, counts);
      sweep(octet, heap);
      stats_.records_ingested += matched;
      ++stats_.subsets;
      ++stats_.subset_passes;
    }
  }

  Stats stats() const noexcept {
    Stats s = stats_;
    s.tracked_bytes = block_.bytes();
    return s;
  }

  std::span<const std::uint64_t> shared_block() const noexcept { return block_.slots(); }

 private:
  template <RecordSource S>
  static void require_replayable(const S& source) {
    if (!source.replayable()) {
      throw Error(ErrorCode::SourceNotReplayable,
                  "the shared-block counter needs one pass per first-octet subset");
    }
  }

  void sweep(std::uint8_t octet, TopKHeap& heap) const {
    const auto counts = block_.slots();
    for (std::uint32_t p = 0; p < kSharedSlots; ++p) {
      if (counts[p] != 0) {
        heap.offer(IpV4Address{octet, static_cast<std::uint8_t>(p >> 16),
                               static_cast<std::uint8_t>(p >> 8), static_cast<std::uint8_t>(p)},
                   counts[p]);
      }
    }
  }

  ZeroedSlots block_;
  PassHooks hooks_;
  Stats stats_;
};

template <RecordSource S>
std::vector<HeapEntry> ssmb_top_k(S& source, std::size_t k) {
  SsmbCounter counter;
  return counter.top_k(source, k);
}

}  // namespace ipstat
