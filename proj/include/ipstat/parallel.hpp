#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/ssmb_counter.hpp"
#include "ipstat/tlmb_counter.hpp"
#include "ipstat/topk_heap.hpp"

namespace ipstat {

enum class Method { tlmb, ssmb, hash, ipmap };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::tlmb: return "tlmb";
    case Method::ssmb: return "ssmb";
    case Method::hash: return "hash";
    case Method::ipmap: return "ipmap";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  if (name == "tlmb") return Method::tlmb;
  if (name == "ssmb") return Method::ssmb;
  if (name == "hash") return Method::hash;
  if (name == "ipmap") return Method::ipmap;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

/// Contiguous range of first octets [base, base + span).
struct OctetRange {
  std::uint8_t base = 0;
  unsigned span = 256;
};

/// How records are split among workers. Both schemes assign by first octet
/// and produce contiguous, disjoint octet ranges that cover all 256 values.
class PartitionPlan {
 public:
  enum class Scheme { prefix_bits, first_octet_subsets };

  /// 2^r workers; worker = top r bits of the first octet.
  static PartitionPlan prefix_bits(unsigned r) {
    if (r > 8) throw Error(ErrorCode::InvalidPlan, "prefix bits must be in [0, 8], got " + std::to_string(r));
    PartitionPlan plan(Scheme::prefix_bits, std::size_t{1} << r);
    plan.r_ = r;
    for (unsigned v = 0; v < 256; ++v) plan.table_[v] = r == 0 ? 0 : static_cast<std::uint16_t>(v >> (8 - r));
    return plan;
  }

  /// One worker per distinct first octet, at most `cap` workers. The q
  /// octets are taken in ascending order and dealt out in contiguous runs.
  /// Octets not in the list go to the worker of the next listed octet
  /// above them (the last worker past the end).
  static PartitionPlan first_octet_subsets(std::vector<std::uint8_t> octets, std::size_t cap) {
    if (cap == 0) throw Error(ErrorCode::InvalidPlan, "worker cap must be at least 1");
    std::sort(octets.begin(), octets.end());
    octets.erase(std::unique(octets.begin(), octets.end()), octets.end());
    const std::size_t q = octets.size();
    const std::size_t workers = std::max<std::size_t>(1, std::min(q, cap));
    PartitionPlan plan(Scheme::first_octet_subsets, workers);
    std::size_t next = 0;  // index of the smallest listed octet >= v
    for (unsigned v = 0; v < 256; ++v) {
      while (next < q && octets[next] < v) ++next;
      const std::size_t i = next < q ? next : (q ? q - 1 : 0);
      plan.table_[v] = q ? static_cast<std::uint16_t>(i * workers / q) : 0;
    }
    plan.octets_ = std::move(octets);
    return plan;
  }

  Scheme scheme() const noexcept { return scheme_; }
  unsigned prefix_bits_r() const noexcept { return r_; }
  std::size_t worker_count() const noexcept { return workers_; }
  const std::vector<std::uint8_t>& subset_octets() const noexcept { return octets_; }

  std::size_t assign(IpV4Address addr) const noexcept { return table_[addr.a]; }

  OctetRange range(std::size_t worker) const noexcept {
    unsigned lo = 256, hi = 0;
    for (unsigned v = 0; v < 256; ++v) {
      if (table_[v] == worker) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (lo > hi) return {0, 0};
    return {static_cast<std::uint8_t>(lo), hi - lo + 1};
  }

 private:
  PartitionPlan(Scheme scheme, std::size_t workers) : scheme_(scheme), workers_(workers) {}

  Scheme scheme_;
  std::size_t workers_;
  unsigned r_ = 0;
  std::array<std::uint16_t, 256> table_{};
  std::vector<std::uint8_t> octets_;
};

struct WorkerResult {
  std::size_t ordinal = 0;
  OctetRange range;
  std::uint64_t records_ingested = 0;
  std::uint64_t tracked_bytes = 0;
  std::uint64_t first_layer_bytes = 0;  // TLMB only
  std::vector<HeapEntry> candidates;
};

struct ParallelRun {
  std::vector<HeapEntry> entries;
  std::vector<WorkerResult> workers;

  std::uint64_t tracked_bytes() const noexcept {
    std::uint64_t total = 0;
    for (const auto& w : workers) total += w.tracked_bytes;
    return total;
  }
};

namespace detail {

template <class Fn>
void run_workers(std::size_t count, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> threads;
    threads.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
      threads.emplace_back([&, w] {
        try {
          fn(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Runs TLMB or SSMB with one private counter per worker and merges the
/// workers' local top-k lists. TLMB reads the source once and routes
/// records to workers, each with a first layer narrowed to its octet range.
/// SSMB discovers the subsets once, then every worker replays the source
/// for its own subsets.
template <RecordSource S>
ParallelRun parallel_run(S& source, Method method, const PartitionPlan& plan, std::size_t k) {
  require_k(k);
  const std::size_t workers = plan.worker_count();
  ParallelRun run;
  run.workers.resize(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    run.workers[w].ordinal = w;
    run.workers[w].range = plan.range(w);
  }

  if (method == Method::tlmb) {
    std::vector<std::vector<IpV4Address>> buckets(workers);
    source.for_each([&](IpV4Address addr) { buckets[plan.assign(addr)].push_back(addr); });
    detail::run_workers(workers, [&](std::size_t w) {
      WorkerResult& out = run.workers[w];
      if (out.range.span == 0) return;
      TlmbCounter counter(out.range.base, out.range.span);
      for (const auto& addr : buckets[w]) counter.ingest(addr);
      std::vector<IpV4Address>().swap(buckets[w]);
      const auto stats = counter.stats();
      out.records_ingested = stats.records_ingested;
      out.tracked_bytes = stats.tracked_bytes;
      out.first_layer_bytes = stats.first_layer_bytes;
      out.candidates = counter.top_k(k);
    });
  } else if (method == Method::ssmb) {
    if constexpr (std::copy_constructible<S>) {
      if (!source.replayable()) {
        throw Error(ErrorCode::SourceNotReplayable, "parallel SSMB replays the source per worker");
      }
      const std::vector<std::uint8_t> present = first_octets_present(source);
      std::vector<std::vector<std::uint8_t>> assigned(workers);
      for (const std::uint8_t octet : present) {
        assigned[plan.assign(IpV4Address{octet, 0, 0, 0})].push_back(octet);
      }
      detail::run_workers(workers, [&](std::size_t w) {
        if (assigned[w].empty()) return;
        S replay = source;
        SsmbCounter counter;
        TopKHeap heap(k);
        counter.count_subsets(replay, assigned[w], heap);
        WorkerResult& out = run.workers[w];
        const auto stats = counter.stats();
        out.records_ingested = stats.records_ingested;
        out.tracked_bytes = stats.tracked_bytes;
        out.candidates = heap.drain_sorted();
      });
    } else {
      throw Error(ErrorCode::SourceNotReplayable, "parallel SSMB needs a copyable, replayable source");
    }
  } else {
    throw Error(ErrorCode::InvalidPlan,
                std::string("parallel execution supports tlmb and ssmb, not ") + to_string(method));
  }

  std::vector<std::vector<HeapEntry>> candidates;
  candidates.reserve(workers);
  for (const auto& w : run.workers) candidates.push_back(w.candidates);
  run.entries = merge_top_k(candidates, k);
  return run;
}

template <RecordSource S>
std::vector<HeapEntry> parallel_top_k(S& source, Method method, const PartitionPlan& plan,
                                      std::size_t k) {
  return parallel_run(source, method, plan, k).entries;
}

}  // namespace ipstat
