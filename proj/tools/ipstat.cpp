// ipstat: generate IPv4 record datasets, find the k most frequent
// addresses, and benchmark the counting methods.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipstat/ipstat.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;

int exit_code_for(ipstat::ErrorCode code) {
  using ipstat::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidPlan:
      return kExitUsage;
    case ErrorCode::ValidationFailure:
    case ErrorCode::Mismatch:
      return kExitValidation;
    default:
      return kExitIo;
  }
}

struct GenArgs {
  std::uint64_t records = 0;
  std::uint64_t distinct = 0;
  std::uint64_t seed = 0;
  std::string dist = "uniform";
  std::optional<unsigned> first_octet_cap;
  std::string format = "text";
  std::string out;
};

struct TopkArgs {
  std::string method;
  std::size_t k = 0;
  std::string input;
  std::size_t workers = 1;
  std::string format;
  bool lenient = false;
};

struct BenchArgs {
  std::string input;
  std::string truth;
  std::vector<std::string> methods;
  std::vector<std::size_t> ks;
  std::size_t reps = 1;
  std::size_t warmup = 0;
  std::string csv;
  std::size_t workers = 1;
};

int cmd_gen(const GenArgs& args) {
  ipstat::DatasetSpec spec;
  spec.records = args.records;
  spec.distinct = args.distinct;
  spec.seed = args.seed;
  spec.distribution = ipstat::Distribution::parse(args.dist);
  spec.first_octet_cap = args.first_octet_cap;
  spec.format = ipstat::parse_format(args.format);
  const auto result = ipstat::generate(spec, args.out);
  std::printf("generated n=%llu d=%llu file=%s\n",
              static_cast<unsigned long long>(result.written_records),
              static_cast<unsigned long long>(result.distinct_written), args.out.c_str());
  return kExitOk;
}

int cmd_topk(const TopkArgs& args) {
  const auto method = ipstat::parse_method(args.method);
  const auto format =
      args.format.empty() ? ipstat::detect_format(args.input) : ipstat::parse_format(args.format);
  ipstat::FileSource source(args.input, format, args.lenient);
  const auto run = ipstat::run_method(source, method, args.k, args.workers);
  std::string out;
  for (const auto& e : run.entries) {
    out += ipstat::format(e.address);
    out += '\t';
    out += std::to_string(e.count);
    out += '\n';
  }
  std::fwrite(out.data(), 1, out.size(), stdout);
  if (args.lenient && source.last_skipped() > 0) {
    std::fprintf(stderr, "skipped %llu malformed lines\n",
                 static_cast<unsigned long long>(source.last_skipped()));
  }
  return kExitOk;
}

int cmd_bench(const BenchArgs& args) {
  ipstat::BenchConfig config;
  config.input = args.input;
  config.truth = args.truth;
  for (const auto& m : args.methods) config.methods.push_back(ipstat::parse_method(m));
  config.ks = args.ks;
  config.repetitions = args.reps;
  config.warmup = args.warmup;
  config.workers = args.workers;
  const auto report = ipstat::run_bench(config);
  ipstat::write_csv(args.csv, report);
  for (const auto& row : report.rows) {
    std::printf("%-6s k=%-5zu n=%llu best=%.4fs mean=%.4fs tracked=%llu validated\n",
                ipstat::to_string(row.method), row.k, static_cast<unsigned long long>(row.n),
                row.elapsed_seconds, row.mean, static_cast<unsigned long long>(row.tracked_bytes));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-k frequent IPv4 addresses with memory-block counters"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic record file and its .truth sidecar");
  gen_cmd->add_option("--records", gen.records, "Number of records n")->required();
  gen_cmd->add_option("--distinct", gen.distinct, "Number of distinct addresses d")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--dist", gen.dist, "uniform or zipf:EXP")->capture_default_str();
  gen_cmd->add_option("--first-octet-cap", gen.first_octet_cap, "Limit on distinct first octets")
      ->check(CLI::Range(1u, 256u));
  gen_cmd->add_option("--format", gen.format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output record file")->required();

  TopkArgs topk;
  auto* topk_cmd = app.add_subcommand("topk", "Print the k most frequent addresses");
  topk_cmd->add_option("--method", topk.method, "tlmb, ssmb, hash or ipmap")
      ->required()
      ->check(CLI::IsMember({"tlmb", "ssmb", "hash", "ipmap"}));
  topk_cmd->add_option("--k", topk.k, "Number of addresses")->required()->check(CLI::PositiveNumber);
  topk_cmd->add_option("--input", topk.input, "Record file")->required();
  topk_cmd->add_option("--workers", topk.workers, "Parallel workers (tlmb: power of two)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  topk_cmd->add_option("--format", topk.format, "text or binary (default: detect)")
      ->check(CLI::IsMember({"text", "binary"}));
  topk_cmd->add_flag("--lenient", topk.lenient, "Skip malformed lines instead of failing");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time methods against a validated ground truth");
  bench_cmd->add_option("--input", bench.input, "Record file")->required();
  bench_cmd->add_option("--truth", bench.truth, "Ground-truth sidecar")->required();
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember({"tlmb", "ssmb", "hash", "ipmap"}));
  bench_cmd->add_option("--k", bench.ks, "Comma-separated k values")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", bench.reps, "Timed repetitions")->required()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", bench.warmup, "Untimed runs before timing")->capture_default_str();
  bench_cmd->add_option("--csv", bench.csv, "Output CSV path")->required();
  bench_cmd->add_option("--workers", bench.workers, "Parallel workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*topk_cmd) return cmd_topk(topk);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const ipstat::Error& e) {
    std::fprintf(stderr, "ipstat: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ipstat: %s\n", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
