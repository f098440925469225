#pragma once

// Per-phase cost measurement: exact operation counts and mean wall time.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rbeks/op_counter.hpp"
#include "rbeks/pairing.hpp"

namespace rbeks {

enum class BenchPhase {
  kEnc,
  kTrapGen,
  kAuthentication,
  kKeySearch,
  kPartialDec,
  kDecryption,
};

std::string_view bench_phase_name(BenchPhase p);
// Case-insensitive; throws kInvalidArgument.
BenchPhase parse_bench_phase(std::string_view name);
std::vector<BenchPhase> all_bench_phases();

struct BenchParams {
  std::size_t gamma = 1;      // |Gamma|
  std::size_t gamma_phi = 1;  // |Gamma_Phi|, one hierarchy per org
  std::size_t presented = 1;  // |S|
  std::size_t keywords = 1;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  SecurityLevel level = SecurityLevel::kOrder160;
};

struct BenchReport {
  BenchPhase phase;
  BenchParams params;
  OpCounts ops;      // per trial; identical across trials
  double mean_ms = 0;
  std::vector<double> samples_ms;
};

// Throws kInvalidArgument for inconsistent sizes: trials >= 1,
// 1 <= gamma_phi <= gamma, and presented >= gamma_phi.
BenchReport bench(BenchPhase phase, const BenchParams& params);

// One report per entry. Trials are taken round robin across the entries, so
// slow drift in machine speed spreads evenly over the sizes.
std::vector<BenchReport> bench_series(BenchPhase phase,
                                      const std::vector<BenchParams>& sizes);

void write_bench_csv_header(std::ostream& out);
void write_bench_csv_row(std::ostream& out, const BenchReport& r);

}  // namespace rbeks
