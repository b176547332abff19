#include "tensprov/kernels.hpp"

#include <omp.h>

namespace tensprov::kernels {

namespace {

// Appends the composed tuples produced by leaf k of `second`.
inline void compose_one(const ProvTensor& first, const ProvTensor& second, std::size_t second_dim,
                        std::size_t k, std::vector<RowIndex>& out) {
  const RowIndex key = second.entry(k, second_dim);
  auto emit = [&](auto&& first_entry) {
    out.push_back(second.entry(k, 0));
    for (std::size_t d = 1; d < first.order(); ++d) out.push_back(first_entry(d));
    for (std::size_t d = 1; d < second.order(); ++d) {
      if (d != second_dim) out.push_back(second.entry(k, d));
    }
  };
  if (first.is_identity()) {
    if (key < first.nnz()) emit([key](std::size_t) { return key; });
    return;
  }
  for (std::uint32_t leaf : first.refs(0, key)) {
    emit([&first, leaf](std::size_t d) { return first.entry(leaf, d); });
  }
}

inline RowSet forward_one(const ProvTensor& t, std::size_t in_dim, std::size_t out_dim, RowIndex row) {
  const RowIndex seed[1] = {row};
  return project(slice(t, in_dim, seed), out_dim);
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<RowIndex> compose_leaves_serial(const ProvTensor& first, const ProvTensor& second,
                                            std::size_t second_dim) {
  std::vector<RowIndex> out;
  for (std::size_t k = 0; k < second.nnz(); ++k) compose_one(first, second, second_dim, k, out);
  return out;
}

std::vector<RowIndex> compose_leaves(const ProvTensor& first, const ProvTensor& second,
                                     std::size_t second_dim) {
  const auto n = static_cast<std::int64_t>(second.nnz());
  const int threads = omp_get_max_threads();
  if (threads == 1 || n < 4096) return compose_leaves_serial(first, second, second_dim);

  std::vector<std::vector<RowIndex>> parts(threads);
#pragma omp parallel num_threads(threads)
  {
    auto& local = parts[omp_get_thread_num()];
    // Static schedule hands each thread one contiguous block, so concatenating
    // by thread id reproduces the serial order.
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      compose_one(first, second, second_dim, static_cast<std::size_t>(k), local);
    }
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<RowIndex> out;
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<std::size_t> hash_rows_serial(const Dataset& d) {
  std::vector<std::size_t> out(d.row_count());
  for (std::size_t i = 0; i < d.row_count(); ++i) out[i] = hash_row(d.rows()[i]);
  return out;
}

std::vector<std::size_t> hash_rows(const Dataset& d) {
  const auto n = static_cast<std::int64_t>(d.row_count());
  std::vector<std::size_t> out(d.row_count());
  const auto& rows = d.rows();
#pragma omp parallel for schedule(static) if (n >= 4096)
  for (std::int64_t i = 0; i < n; ++i) out[i] = hash_row(rows[i]);
  return out;
}

std::vector<RowSet> forward_all_serial(const ProvTensor& t, std::size_t in_dim, std::size_t out_dim,
                                       std::size_t input_rows) {
  std::vector<RowSet> out(input_rows);
  for (std::size_t i = 0; i < input_rows; ++i) {
    out[i] = forward_one(t, in_dim, out_dim, static_cast<RowIndex>(i));
  }
  return out;
}

std::vector<RowSet> forward_all(const ProvTensor& t, std::size_t in_dim, std::size_t out_dim,
                                std::size_t input_rows) {
  const auto n = static_cast<std::int64_t>(input_rows);
  std::vector<RowSet> out(input_rows);
#pragma omp parallel for schedule(dynamic, 256) if (n >= 4096)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = forward_one(t, in_dim, out_dim, static_cast<RowIndex>(i));
  }
  return out;
}

}  // namespace tensprov::kernels
