#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "ipstat/baselines.hpp"
#include "ipstat/error.hpp"
#include "ipstat/parallel.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/ssmb_counter.hpp"
#include "ipstat/tlmb_counter.hpp"
#include "ipstat/topk_heap.hpp"

namespace ipstat {

struct MethodRun {
  std::vector<HeapEntry> entries;
  std::uint64_t records = 0;
  /// Counting-structure bytes (summed over workers), heap excluded.
  std::uint64_t tracked_bytes = 0;
};

/// Plan used for `workers` workers: prefix bits for TLMB (workers must be a
/// power of two, r = log2(workers)), first-octet subsets for SSMB (workers
/// is the cap). Other methods are serial only.
template <RecordSource S>
PartitionPlan plan_for(S& source, Method method, std::size_t workers) {
  if (workers == 0) throw Error(ErrorCode::InvalidPlan, "workers must be at least 1");
  switch (method) {
    case Method::tlmb:
      if (!std::has_single_bit(workers) || workers > 256) {
        throw Error(ErrorCode::InvalidPlan,
                    "tlmb workers must be a power of two in [1, 256], got " + std::to_string(workers));
      }
      return PartitionPlan::prefix_bits(static_cast<unsigned>(std::countr_zero(workers)));
    case Method::ssmb:
      return PartitionPlan::first_octet_subsets(first_octets_present(source), workers);
    default:
      throw Error(ErrorCode::InvalidPlan,
                  std::string(to_string(method)) + " does not support parallel workers");
  }
}

/// Runs one method end to end over `source`.
template <RecordSource S>
MethodRun run_method(S& source, Method method, std::size_t k, std::size_t workers = 1) {
  require_k(k);
  MethodRun out;
  if (workers > 1) {
    const PartitionPlan plan = plan_for(source, method, workers);
    ParallelRun run = parallel_run(source, method, plan, k);
    for (const auto& w : run.workers) out.records += w.records_ingested;
    out.tracked_bytes = run.tracked_bytes();
    out.entries = std::move(run.entries);
    return out;
  }
  switch (method) {
    case Method::tlmb: {
      TlmbCounter counter;
      counter.ingest_all(source);
      out.entries = counter.top_k(k);
      out.records = counter.stats().records_ingested;
      out.tracked_bytes = counter.stats().tracked_bytes;
      break;
    }
    case Method::ssmb: {
      SsmbCounter counter;
      out.entries = counter.top_k(source, k);
      out.records = counter.stats().records_ingested;
      out.tracked_bytes = counter.stats().tracked_bytes;
      break;
    }
    case Method::hash: {
      HashCounter counter;
      counter.ingest_all(source);
      out.entries = counter.top_k(k);
      out.records = counter.stats().records_ingested;
      out.tracked_bytes = counter.stats().tracked_bytes;
      break;
    }
    case Method::ipmap: {
      IpMapCounter counter;
      counter.ingest_all(source);
      out.entries = counter.top_k(k);
      out.records = counter.stats().records_ingested;
      out.tracked_bytes = counter.stats().tracked_bytes;
      break;
    }
  }
  return out;
}

}  // namespace ipstat
