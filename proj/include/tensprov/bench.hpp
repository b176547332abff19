#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "tensprov/dataset.hpp"
#include "tensprov/json_io.hpp"

namespace tensprov {

// Synthetic two-table join workload shaped like a TPC-DI trade/customer pair:
// wide rows, unique customer keys on the right, and left rows whose key hits
// an existing customer with probability match_rate.
struct BenchConfig {
  std::size_t scale_factor = 1;
  std::size_t rows_per_sf_left = 15000;
  std::size_t rows_per_sf_right = 15000;
  double match_rate = 0.9;
  std::uint64_t seed = 42;
  std::size_t query_samples = 50;
  // q1_avg_ms is the median per-query time over this many batches.
  std::size_t query_rounds = 7;
};

struct BenchResult {
  std::size_t sf = 0;
  std::size_t left_rows = 0;
  std::size_t right_rows = 0;
  std::size_t out_rows = 0;
  double capture_ms = 0.0;
  std::size_t tensor_bytes = 0;
  double q1_avg_ms = 0.0;
  std::size_t q1_hits = 0;  // output rows reached by one batch
  std::size_t input_csv_bytes = 0;  // both tables serialized as CSV
};

std::pair<Dataset, Dataset> generate_tables(const BenchConfig& config);
BenchResult run_bench(const BenchConfig& config);

std::string bench_csv_header();
std::string bench_csv_row(const BenchResult& r);
json bench_to_json(const BenchResult& r);

}  // namespace tensprov
