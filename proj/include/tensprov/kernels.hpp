#pragma once

#include <cstddef>
#include <vector>

#include "tensprov/dataset.hpp"
#include "tensprov/prov_tensor.hpp"

// Data-parallel inner loops. Each kernel has an OpenMP version used by the
// engine and a serial reference kept for tests and the benchmark.
namespace tensprov::kernels {

// Flat tuples of compose(first, second, second_dim), possibly with duplicates,
// in the result dimension order documented on compose().
std::vector<RowIndex> compose_leaves(const ProvTensor& first, const ProvTensor& second,
                                     std::size_t second_dim);
std::vector<RowIndex> compose_leaves_serial(const ProvTensor& first, const ProvTensor& second,
                                            std::size_t second_dim);

std::vector<std::size_t> hash_rows(const Dataset& d);
std::vector<std::size_t> hash_rows_serial(const Dataset& d);

// Forward image of every input row through one tensor hop: result[i] is
// project(slice(t, in_dim, {i}), out_dim).
std::vector<RowSet> forward_all(const ProvTensor& t, std::size_t in_dim, std::size_t out_dim,
                                std::size_t input_rows);
std::vector<RowSet> forward_all_serial(const ProvTensor& t, std::size_t in_dim,
                                       std::size_t out_dim, std::size_t input_rows);

int max_threads();

}  // namespace tensprov::kernels
