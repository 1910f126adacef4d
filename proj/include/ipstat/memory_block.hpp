#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ipstat/error.hpp"

namespace ipstat {

inline constexpr std::size_t kBlockSlots = 256;

/// 256 contiguous 8-byte slots, indexed by one octet.
using MemoryBlock = std::array<std::uint64_t, kBlockSlots>;

static_assert(sizeof(MemoryBlock) == 2048);

/// Fixed-size, zero-initialised array of 64-bit slots obtained from calloc,
/// so large reservations are backed by the OS zero page until first write.
class ZeroedSlots {
 public:
  ZeroedSlots() = default;

  explicit ZeroedSlots(std::size_t slots)
      : data_(static_cast<std::uint64_t*>(std::calloc(slots, sizeof(std::uint64_t)))),
        size_(slots) {
    if (!data_ && slots != 0) {
      throw Error(ErrorCode::AllocationFailure,
                  "cannot reserve " + std::to_string(slots * sizeof(std::uint64_t)) + " bytes");
    }
  }

  std::uint64_t& operator[](std::size_t i) noexcept { return data_.get()[i]; }
  std::uint64_t operator[](std::size_t i) const noexcept { return data_.get()[i]; }

  std::span<std::uint64_t> slots() noexcept { return {data_.get(), size_}; }
  std::span<const std::uint64_t> slots() const noexcept { return {data_.get(), size_}; }

  std::size_t size() const noexcept { return size_; }
  std::uint64_t bytes() const noexcept { return size_ * sizeof(std::uint64_t); }

  void clear() noexcept {
    if (size_) std::memset(data_.get(), 0, bytes());
  }

 private:
  struct Free {
    void operator()(std::uint64_t* p) const noexcept { std::free(p); }
  };
  std::unique_ptr<std::uint64_t, Free> data_;
  std::size_t size_ = 0;
};

/// Hands out zeroed MemoryBlocks by handle. Handles are 1-based so that a
/// zero slot can mean "no block". Blocks live in fixed chunks and never
/// move; release_all() recycles them without returning memory to the OS.
class BlockPool {
 public:
  using Handle = std::uint64_t;
  static constexpr Handle kNone = 0;

  Handle acquire() {
    Handle h;
    if (!free_.empty()) {
      h = free_.back();
      free_.pop_back();
      at(h).fill(0);
    } else {
      if (reserved_ % kChunkBlocks == 0) {
        chunks_.push_back(std::make_unique<MemoryBlock[]>(kChunkBlocks));  // value-initialised
      }
      h = ++reserved_;
    }
    ++live_;
    return h;
  }

  MemoryBlock& at(Handle h) noexcept {
    const std::uint64_t i = h - 1;
    return chunks_[i / kChunkBlocks][i % kChunkBlocks];
  }
  const MemoryBlock& at(Handle h) const noexcept {
    const std::uint64_t i = h - 1;
    return chunks_[i / kChunkBlocks][i % kChunkBlocks];
  }

  void release_all() {
    free_.clear();
    for (Handle h = reserved_; h >= 1; --h) free_.push_back(h);
    live_ = 0;
  }

  /// Blocks currently handed out.
  std::uint64_t live() const noexcept { return live_; }
  /// Blocks ever created (live plus recycled).
  std::uint64_t reserved() const noexcept { return reserved_; }

 private:
  static constexpr std::size_t kChunkBlocks = 64;

  std::vector<std::unique_ptr<MemoryBlock[]>> chunks_;
  std::vector<Handle> free_;
  std::uint64_t reserved_ = 0;
  std::uint64_t live_ = 0;
};

}  // namespace ipstat
