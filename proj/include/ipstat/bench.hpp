#pragma once

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ipstat/datagen.hpp"
#include "ipstat/error.hpp"
#include "ipstat/methods.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/topk_heap.hpp"

namespace ipstat {

struct BenchConfig {
  std::filesystem::path input;
  std::filesystem::path truth;
  std::vector<Method> methods;
  std::vector<std::size_t> ks;
  std::size_t repetitions = 1;
  std::size_t warmup = 0;
  std::size_t workers = 1;
};

/// One method x k cell. Timings cover reading the records, counting and
/// top-k extraction (all passes for SSMB). Validation is outside the timer.
struct BenchRow {
  Method method = Method::tlmb;
  std::string dataset_path;
  std::uint64_t n = 0;
  std::size_t k = 0;
  std::size_t workers = 1;
  double elapsed_seconds = 0;  // best repetition
  std::uint64_t tracked_bytes = 0;
  std::optional<std::uint64_t> os_peak_bytes;
  std::size_t repetitions = 0;
  double mean = 0;
  std::optional<double> stddev;  // needs >= 2 repetitions
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Peak resident size of this process so far; informational only.
inline std::optional<std::uint64_t> os_peak_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
}

/// Throws ValidationFailure naming the first rank where `got` departs from
/// the first k entries of `truth` (which must be in ranking order).
inline void validate_top_k(std::span<const HeapEntry> got, std::span<const HeapEntry> truth,
                           std::size_t k, const std::string& label) {
  const std::size_t want = std::min(k, truth.size());
  for (std::size_t i = 0; i < std::max(want, got.size()); ++i) {
    const bool have_got = i < got.size();
    const bool have_want = i < want;
    if (have_got && have_want && got[i] == truth[i]) continue;
    std::string msg = label + " diverges at rank " + std::to_string(i + 1) + ": expected ";
    msg += have_want ? format(truth[i].address) + ":" + std::to_string(truth[i].count) : "nothing";
    msg += ", got ";
    msg += have_got ? format(got[i].address) + ":" + std::to_string(got[i].count) : "nothing";
    throw Error(ErrorCode::ValidationFailure, msg);
  }
}

inline BenchReport run_bench(const BenchConfig& config) {
  if (config.repetitions == 0) throw Error(ErrorCode::InvalidArgument, "repetitions must be at least 1");
  for (const std::size_t k : config.ks) require_k(k);

  std::vector<HeapEntry> truth = read_truth(config.truth);
  std::sort(truth.begin(), truth.end(), ranks_before);
  const RecordFormat format = detect_format(config.input);

  BenchReport report;
  for (const Method method : config.methods) {
    for (const std::size_t k : config.ks) {
      BenchRow row;
      row.method = method;
      row.dataset_path = config.input.string();
      row.k = k;
      row.workers = config.workers;
      row.repetitions = config.repetitions;

      std::vector<double> times;
      for (std::size_t rep = 0; rep < config.warmup + config.repetitions; ++rep) {
        FileSource source(config.input, format);
        const auto start = std::chrono::steady_clock::now();
        const MethodRun run = run_method(source, method, k, config.workers);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        validate_top_k(run.entries, truth, k,
                       std::string(to_string(method)) + " (k=" + std::to_string(k) + ")");
        if (rep < config.warmup) continue;
        times.push_back(elapsed.count());
        row.n = run.records;
        row.tracked_bytes = run.tracked_bytes;
      }

      row.elapsed_seconds = *std::min_element(times.begin(), times.end());
      double sum = 0;
      for (const double t : times) sum += t;
      row.mean = sum / static_cast<double>(times.size());
      if (times.size() >= 2) {
        double sq = 0;
        for (const double t : times) sq += (t - row.mean) * (t - row.mean);
        row.stddev = std::sqrt(sq / static_cast<double>(times.size() - 1));
      }
      row.os_peak_bytes = os_peak_bytes();
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

inline constexpr const char* kBenchCsvHeader =
    "method,dataset_path,n,k,workers,elapsed_seconds,tracked_bytes,os_peak_bytes,repetitions,mean,"
    "stddev";

inline std::string to_csv(const BenchReport& report) {
  auto seconds = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  auto quoted = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  };

  std::string out = kBenchCsvHeader;
  out += '\n';
  for (const auto& r : report.rows) {
    out += to_string(r.method);
    out += ',' + quoted(r.dataset_path);
    out += ',' + std::to_string(r.n);
    out += ',' + std::to_string(r.k);
    out += ',' + std::to_string(r.workers);
    out += ',' + seconds(r.elapsed_seconds);
    out += ',' + std::to_string(r.tracked_bytes);
    out += ',' + (r.os_peak_bytes ? std::to_string(*r.os_peak_bytes) : std::string());
    out += ',' + std::to_string(r.repetitions);
    out += ',' + seconds(r.mean);
    out += ',' + (r.stddev ? seconds(*r.stddev) : std::string());
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const BenchReport& report) {
  std::ofstream out(path, std::ios::binary);
  const std::string csv = to_csv(report);
  out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
  if (!out.flush()) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
}

}  // namespace ipstat
