#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ipstat/baselines.hpp"
#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/topk_heap.hpp"

namespace ipstat {

/// How records are spread over the distinct addresses once each address
/// has its guaranteed first occurrence.
struct Distribution {
  enum class Kind { uniform, zipf };
  Kind kind = Kind::uniform;
  double exponent = 0.0;  // zipf only

  static Distribution uniform() { return {}; }
  static Distribution zipf(double s) { return {Kind::zipf, s}; }

  /// "uniform" or "zipf:<exponent>".
  static Distribution parse(std::string_view text) {
    if (text == "uniform") return uniform();
    if (text.starts_with("zipf:")) {
      const std::string num(text.substr(5));
      std::size_t used = 0;
      double s = 0;
      try {
        s = std::stod(num, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == num.size() && !num.empty() && std::isfinite(s) && s >= 0) return zipf(s);
    }
    throw Error(ErrorCode::InvalidSpec,
                "distribution must be 'uniform' or 'zipf:<exponent >= 0>', got '" + std::string(text) + "'");
  }

  std::string name() const {
    return kind == Kind::uniform ? "uniform" : "zipf:" + std::to_string(exponent);
  }
};

struct DatasetSpec {
  std::uint64_t records = 0;
  std::uint64_t distinct = 0;
  std::uint64_t seed = 0;
  Distribution distribution;
  std::optional<unsigned> first_octet_cap;
  RecordFormat format = RecordFormat::text;

  void validate() const {
    if (distinct > records) throw Error(ErrorCode::InvalidSpec, "distinct exceeds records");
    if (records > 0 && distinct == 0) {
      throw Error(ErrorCode::InvalidSpec, "a non-empty dataset needs at least one distinct address");
    }
    if (first_octet_cap && (*first_octet_cap == 0 || *first_octet_cap > 256)) {
      throw Error(ErrorCode::InvalidSpec, "first-octet cap must be in [1, 256]");
    }
    const std::uint64_t space = std::uint64_t{first_octet_cap.value_or(256)} << 24;
    if (distinct > space) {
      throw Error(ErrorCode::InvalidSpec, "distinct exceeds the address space allowed by the first-octet cap");
    }
    if (format == RecordFormat::binary && records > UINT32_MAX) {
      throw Error(ErrorCode::InvalidSpec, "binary record files hold at most 2^32-1 records");
    }
  }
};

/// Portable random source for dataset generation: std::mt19937_64 (whose
/// output sequence is fixed by the C++ standard) with bounded integers by
/// Lemire's multiply-and-reject and doubles from the top 53 bits. The
/// standard <random> distributions are avoided because their output is
/// implementation-defined.
class DatasetRng {
 public:
  explicit DatasetRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). Precondition: bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct Dataset {
  std::vector<IpV4Address> records;
  /// Every distinct address with its multiplicity, in ranking order.
  std::vector<HeapEntry> truth;
};

/// Builds the records of `spec` in memory. Each distinct address occurs
/// once, the remaining n - d records are drawn from the distribution, and
/// the whole sequence is shuffled.
inline Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  DatasetRng rng(spec.seed);

  std::vector<std::uint8_t> octet_pool(256);
  for (unsigned v = 0; v < 256; ++v) octet_pool[v] = static_cast<std::uint8_t>(v);
  if (spec.first_octet_cap) {
    const unsigned cap = *spec.first_octet_cap;
    for (unsigned i = 0; i < cap; ++i) {
      std::swap(octet_pool[i], octet_pool[i + rng.below(256 - i)]);
    }
    octet_pool.resize(cap);
  }

  std::vector<IpV4Address> addresses;
  addresses.reserve(spec.distinct);
  {
    std::unordered_set<std::uint32_t> seen;
    seen.reserve(spec.distinct);
    while (addresses.size() < spec.distinct) {
      const std::uint32_t word =
          (std::uint32_t{octet_pool[rng.below(octet_pool.size())]} << 24) |
          static_cast<std::uint32_t>(rng.below(1u << 24));
      if (seen.insert(word).second) addresses.push_back(from_u32(word));
    }
  }

  std::vector<std::uint32_t> picks(spec.records);
  for (std::uint64_t i = 0; i < spec.distinct; ++i) picks[i] = static_cast<std::uint32_t>(i);
  if (spec.distribution.kind == Distribution::Kind::zipf && spec.distinct > 0) {
    std::vector<double> cdf(spec.distinct);
    double total = 0;
    for (std::uint64_t i = 0; i < spec.distinct; ++i) {
      total += 1.0 / std::pow(static_cast<double>(i + 1), spec.distribution.exponent);
      cdf[i] = total;
    }
    for (std::uint64_t i = spec.distinct; i < spec.records; ++i) {
      const double u = rng.unit() * total;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      picks[i] = static_cast<std::uint32_t>(std::min<std::uint64_t>(it - cdf.begin(), spec.distinct - 1));
    }
  } else {
    for (std::uint64_t i = spec.distinct; i < spec.records; ++i) {
      picks[i] = static_cast<std::uint32_t>(rng.below(spec.distinct));
    }
  }
  for (std::uint64_t i = spec.records; i > 1; --i) {
    std::swap(picks[i - 1], picks[rng.below(i)]);
  }

  Dataset out;
  std::vector<std::uint64_t> multiplicity(spec.distinct, 0);
  out.records.reserve(spec.records);
  for (const std::uint32_t p : picks) {
    out.records.push_back(addresses[p]);
    ++multiplicity[p];
  }
  out.truth.reserve(spec.distinct);
  for (std::uint64_t i = 0; i < spec.distinct; ++i) out.truth.push_back({addresses[i], multiplicity[i]});
  std::sort(out.truth.begin(), out.truth.end(), ranks_before);
  return out;
}

inline std::filesystem::path truth_path_for(const std::filesystem::path& dataset) {
  std::filesystem::path p = dataset;
  p += ".truth";
  return p;
}

/// Sidecar format: "dotted-quad<TAB>count" lines in ranking order.
inline void write_truth(const std::filesystem::path& path, std::span<const HeapEntry> entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  std::string buf;
  for (const auto& e : entries) {
    buf += format(e.address);
    buf += '\t';
    buf += std::to_string(e.count);
    buf += '\n';
    if (buf.size() > (1 << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out.flush()) throw Error(ErrorCode::IoError, "write failed on '" + path.string() + "'");
}

inline std::vector<HeapEntry> read_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<HeapEntry> out;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::IoError, "expected 'address<TAB>count' in " + path.string(), line_no);
    }
    HeapEntry e;
    try {
      e.address = parse_dotted(std::string_view(line).substr(0, tab));
    } catch (const Error& err) {
      throw Error(err.code(), err.message() + " in " + path.string(), line_no);
    }
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, e.count);
    if (ec != std::errc{} || ptr != last || first == last) {
      throw Error(ErrorCode::IoError, "bad count in " + path.string(), line_no);
    }
    out.push_back(e);
  }
  return out;
}

struct GenerateResult {
  std::uint64_t written_records = 0;
  std::uint64_t distinct_written = 0;
  std::filesystem::path dataset_path;
  std::filesystem::path ground_truth_path;
};

/// Writes the dataset to `out` and its ground truth to `out`.truth.
inline GenerateResult generate(const DatasetSpec& spec, const std::filesystem::path& out) {
  const Dataset data = generate_dataset(spec);
  write_records(out, spec.format, data.records);
  const auto truth_path = truth_path_for(out);
  write_truth(truth_path, data.truth);
  return {data.records.size(), data.truth.size(), out, truth_path};
}

struct VerifyReport {
  std::uint64_t records = 0;
  std::uint64_t distinct = 0;
  std::uint64_t min_multiplicity = 0;
  std::uint64_t max_multiplicity = 0;
  double mean_multiplicity = 0.0;
};

/// Recounts `dataset` with the hash counter and checks it against the
/// sidecar. Throws Mismatch naming the first (lowest) differing address.
inline VerifyReport verify(const std::filesystem::path& dataset, const std::filesystem::path& truth) {
  FileSource source(dataset);
  HashCounter counter;
  counter.ingest_all(source);

  auto by_address = [](const HeapEntry& x, const HeapEntry& y) {
    return to_u32(x.address) < to_u32(y.address);
  };
  std::vector<HeapEntry> counted = counter.sorted_counts();
  std::vector<HeapEntry> expected = read_truth(truth);
  std::sort(counted.begin(), counted.end(), by_address);
  std::sort(expected.begin(), expected.end(), by_address);

  std::size_t i = 0, j = 0;
  while (i < counted.size() || j < expected.size()) {
    const bool have_c = i < counted.size();
    const bool have_e = j < expected.size();
    if (have_c && have_e && counted[i].address == expected[j].address) {
      if (counted[i].count != expected[j].count) {
        throw Error(ErrorCode::Mismatch, format(counted[i].address) + ": dataset has " +
                                             std::to_string(counted[i].count) + ", truth has " +
                                             std::to_string(expected[j].count));
      }
      ++i;
      ++j;
    } else if (have_c && (!have_e || by_address(counted[i], expected[j]))) {
      throw Error(ErrorCode::Mismatch, format(counted[i].address) + ": dataset has " +
                                           std::to_string(counted[i].count) + ", truth has 0");
    } else {
      throw Error(ErrorCode::Mismatch, format(expected[j].address) + ": dataset has 0, truth has " +
                                           std::to_string(expected[j].count));
    }
  }

  VerifyReport report;
  report.records = counter.stats().records_ingested;
  report.distinct = counted.size();
  if (!counted.empty()) {
    report.min_multiplicity = UINT64_MAX;
    for (const auto& e : counted) {
      report.min_multiplicity = std::min(report.min_multiplicity, e.count);
      report.max_multiplicity = std::max(report.max_multiplicity, e.count);
    }
    report.mean_multiplicity = static_cast<double>(report.records) / static_cast<double>(report.distinct);
  }
  return report;
}

}  // namespace ipstat
