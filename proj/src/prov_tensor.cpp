#include "tensprov/prov_tensor.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "tensprov/error.hpp"
#include "tensprov/kernels.hpp"

namespace tensprov {

RowSet make_row_set(std::vector<RowIndex> rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

std::vector<std::vector<RowIndex>> LeafSet::sorted_tuples() const {
  std::vector<std::vector<RowIndex>> out;
  out.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) {
    auto t = tuple(k);
    out.emplace_back(t.begin(), t.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

DimIndex DimIndex::build(std::span<const RowIndex> entries, std::size_t order, std::size_t dim) {
  DimIndex idx;
  const std::size_t n = order ? entries.size() / order : 0;
  std::vector<std::pair<RowIndex, std::uint32_t>> pairs(n);
  for (std::size_t k = 0; k < n; ++k) {
    pairs[k] = {entries[k * order + dim], static_cast<std::uint32_t>(k)};
  }
  // Dimension 0 arrives sorted because leaves are kept in lexicographic order.
  if (!std::is_sorted(pairs.begin(), pairs.end())) std::sort(pairs.begin(), pairs.end());
  idx.refs_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || pairs[k].first != pairs[k - 1].first) {
      idx.keys_.push_back(pairs[k].first);
      idx.offsets_.push_back(static_cast<std::uint32_t>(k));
    }
    idx.refs_.push_back(pairs[k].second);
  }
  idx.offsets_.push_back(static_cast<std::uint32_t>(n));
  return idx;
}

std::span<const std::uint32_t> DimIndex::lookup(RowIndex row) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), row);
  if (it == keys_.end() || *it != row) return {};
  const auto k = static_cast<std::size_t>(it - keys_.begin());
  return {refs_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
}

ProvTensor ProvTensor::identity(DatasetId input, DatasetId output, std::size_t n) {
  ProvTensor t;
  t.dims_ = {{std::move(output), Polarity::Output, n}, {std::move(input), Polarity::Input, n}};
  t.identity_ = true;
  t.identity_size_ = n;
  return t;
}

ProvTensor ProvTensor::from_leaves(std::vector<DimensionRole> dims, std::vector<RowIndex> entries) {
  const std::size_t order = dims.size();
  if (order < 2) throw Error(ErrorKind::InvalidArgument, "tensor order must be at least 2");
  if (dims[0].polarity != Polarity::Output) {
    throw Error(ErrorKind::InvalidArgument, "dimension 0 must be the output dimension");
  }
  for (std::size_t d = 1; d < order; ++d) {
    if (dims[d].polarity != Polarity::Input) {
      throw Error(ErrorKind::InvalidArgument, "exactly one dimension may be an output");
    }
  }
  if (entries.size() % order != 0) {
    throw Error(ErrorKind::InvalidArgument, "leaf entries are not a multiple of the order");
  }
  const std::size_t n = entries.size() / order;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t d = 0; d < order; ++d) {
      if (entries[k * order + d] >= dims[d].extent) {
        throw Error(ErrorKind::OutOfRange,
                    "leaf entry " + std::to_string(entries[k * order + d]) + " exceeds extent " +
                        std::to_string(dims[d].extent) + " of dataset '" + dims[d].dataset + "'");
      }
    }
  }

  auto less = [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(entries.begin() + a * order, entries.begin() + (a + 1) * order,
                                        entries.begin() + b * order, entries.begin() + (b + 1) * order);
  };
  auto same = [&](std::uint32_t a, std::uint32_t b) {
    return std::equal(entries.begin() + a * order, entries.begin() + (a + 1) * order,
                      entries.begin() + b * order);
  };
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  bool sorted_unique = true;
  for (std::size_t k = 1; k < n && sorted_unique; ++k) sorted_unique = less(perm[k - 1], perm[k]);

  ProvTensor t;
  t.dims_ = std::move(dims);
  if (sorted_unique) {
    t.leaf_entries_ = std::move(entries);
  } else {
    std::sort(perm.begin(), perm.end(), less);
    perm.erase(std::unique(perm.begin(), perm.end(), same), perm.end());
    t.leaf_entries_.reserve(perm.size() * order);
    for (auto p : perm) {
      t.leaf_entries_.insert(t.leaf_entries_.end(), entries.begin() + p * order,
                             entries.begin() + (p + 1) * order);
    }
  }
  t.index_.reserve(order);
  for (std::size_t d = 0; d < order; ++d) t.index_.push_back(DimIndex::build(t.leaf_entries_, order, d));
  return t;
}

void ProvTensor::check_dim(std::size_t dim) const {
  if (dim >= order()) {
    throw Error(ErrorKind::OutOfRange, "dimension " + std::to_string(dim) + " out of range for order " +
                                           std::to_string(order()));
  }
}

RowIndex ProvTensor::entry(std::size_t leaf, std::size_t dim) const {
  check_dim(dim);
  if (leaf >= nnz()) throw Error(ErrorKind::OutOfRange, "leaf " + std::to_string(leaf) + " out of range");
  if (identity_) return static_cast<RowIndex>(leaf);
  return leaf_entries_[leaf * order() + dim];
}

LeafSet ProvTensor::leaves() const {
  LeafSet out{order(), {}};
  if (identity_) {
    out.entries.reserve(2 * identity_size_);
    for (std::size_t i = 0; i < identity_size_; ++i) {
      out.entries.push_back(static_cast<RowIndex>(i));
      out.entries.push_back(static_cast<RowIndex>(i));
    }
  } else {
    out.entries = leaf_entries_;
  }
  return out;
}

std::span<const std::uint32_t> ProvTensor::refs(std::size_t dim, RowIndex row) const {
  check_dim(dim);
  if (identity_) return {};
  return index_[dim].lookup(row);
}

std::size_t ProvTensor::index_size(std::size_t dim) const {
  check_dim(dim);
  return identity_ ? identity_size_ : index_[dim].key_count();
}

bool ProvTensor::indexes(std::size_t dim, RowIndex row) const {
  check_dim(dim);
  return identity_ ? row < identity_size_ : index_[dim].contains(row);
}

RowSet ProvTensor::indexed_rows(std::size_t dim) const {
  check_dim(dim);
  if (identity_) {
    RowSet rows(identity_size_);
    std::iota(rows.begin(), rows.end(), RowIndex{0});
    return rows;
  }
  auto keys = index_[dim].keys();
  return RowSet(keys.begin(), keys.end());
}

std::vector<std::size_t> ProvTensor::dims_for(const DatasetId& dataset) const {
  std::vector<std::size_t> out;
  for (std::size_t d = 1; d < order(); ++d) {
    if (dims_[d].dataset == dataset) out.push_back(d);
  }
  return out;
}

std::size_t ProvTensor::memory_bytes() const {
  std::size_t bytes = kTensorOverhead + kDimOverhead * order();
  if (identity_) return bytes;
  bytes += kTupleEntryBytes * leaf_entries_.size();
  for (const auto& idx : index_) {
    bytes += kLeafRefBytes * idx.ref_count() + kIndexEntryBytes * idx.key_count();
  }
  return bytes;
}

ProvTensor identity_tensor(const DatasetId& input, const DatasetId& output, std::size_t n) {
  return ProvTensor::identity(input, output, n);
}

ProvTensor masking_tensor(const DatasetId& input, const DatasetId& output, std::size_t input_rows,
                          std::span<const RowIndex> kept) {
  std::vector<RowIndex> entries;
  entries.reserve(2 * kept.size());
  for (std::size_t o = 0; o < kept.size(); ++o) {
    if (o > 0 && kept[o] <= kept[o - 1]) {
      throw Error(ErrorKind::InvalidArgument, "masking tensor: kept rows must be strictly increasing");
    }
    entries.push_back(static_cast<RowIndex>(o));
    entries.push_back(kept[o]);
  }
  return ProvTensor::from_leaves(
      {{output, Polarity::Output, kept.size()}, {input, Polarity::Input, input_rows}},
      std::move(entries));
}

ProvTensor join_tensor(const DatasetId& output, std::size_t output_rows, const DatasetId& left,
                       std::size_t left_rows, const DatasetId& right, std::size_t right_rows,
                       std::span<const JoinTriple> triples) {
  std::vector<bool> seen(output_rows, false);
  std::vector<RowIndex> entries;
  entries.reserve(3 * triples.size());
  for (const auto& t : triples) {
    if (t.out < output_rows) {
      if (seen[t.out]) {
        throw Error(ErrorKind::InvalidArgument,
                    "join tensor: output row " + std::to_string(t.out) + " appears in two triples");
      }
      seen[t.out] = true;
    }
    entries.insert(entries.end(), {t.out, t.left, t.right});
  }
  return ProvTensor::from_leaves({{output, Polarity::Output, output_rows},
                                  {left, Polarity::Input, left_rows},
                                  {right, Polarity::Input, right_rows}},
                                 std::move(entries));
}

std::pair<ProvTensor, ProvTensor> append_tensors(const DatasetId& output, const DatasetId& left,
                                                 const DatasetId& right, std::size_t n,
                                                 std::size_t m) {
  std::vector<RowIndex> l;
  std::vector<RowIndex> r;
  l.reserve(2 * n);
  r.reserve(2 * m);
  for (std::size_t i = 0; i < n; ++i) l.insert(l.end(), {static_cast<RowIndex>(i), static_cast<RowIndex>(i)});
  for (std::size_t j = 0; j < m; ++j) {
    r.insert(r.end(), {static_cast<RowIndex>(n + j), static_cast<RowIndex>(j)});
  }
  return {ProvTensor::from_leaves({{output, Polarity::Output, n + m}, {left, Polarity::Input, n}},
                                  std::move(l)),
          ProvTensor::from_leaves({{output, Polarity::Output, n + m}, {right, Polarity::Input, m}},
                                  std::move(r))};
}

ProvTensor augmentation_tensor(const DatasetId& input, std::size_t input_rows,
                               const DatasetId& output, std::size_t output_rows,
                               std::span<const RowPair> pairs) {
  std::vector<RowIndex> entries;
  entries.reserve(2 * pairs.size());
  for (const auto& p : pairs) entries.insert(entries.end(), {p.out, p.in});
  return ProvTensor::from_leaves(
      {{output, Polarity::Output, output_rows}, {input, Polarity::Input, input_rows}},
      std::move(entries));
}

LeafSet slice(const ProvTensor& t, std::size_t dim, std::span<const RowIndex> rows,
              AccessCounter* counter) {
  t.check_dim(dim);
  RowSet owned;
  if (!std::is_sorted(rows.begin(), rows.end()) ||
      std::adjacent_find(rows.begin(), rows.end()) != rows.end()) {
    owned = make_row_set({rows.begin(), rows.end()});
    rows = owned;
  }
  LeafSet out{t.order(), {}};
  if (t.identity_) {
    for (RowIndex r : rows) {
      if (r >= t.identity_size_) continue;
      if (counter) ++counter->leaf_refs;
      out.entries.push_back(r);
      out.entries.push_back(r);
    }
    return out;
  }
  const std::size_t order = t.order();
  for (RowIndex r : rows) {
    for (std::uint32_t leaf : t.index_[dim].lookup(r)) {
      if (counter) ++counter->leaf_refs;
      auto first = t.leaf_entries_.begin() + leaf * order;
      out.entries.insert(out.entries.end(), first, first + order);
    }
  }
  return out;
}

RowSet project(const LeafSet& leaves, std::size_t dim) {
  if (leaves.empty()) return {};
  if (dim >= leaves.order) throw Error(ErrorKind::OutOfRange, "projection dimension out of range");
  std::vector<RowIndex> rows;
  rows.reserve(leaves.size());
  for (std::size_t k = 0; k < leaves.size(); ++k) rows.push_back(leaves.entries[k * leaves.order + dim]);
  return make_row_set(std::move(rows));
}

ProvTensor project_dims(const ProvTensor& t, std::span<const std::size_t> keep) {
  if (keep.size() < 2 || keep[0] != 0) {
    throw Error(ErrorKind::InvalidArgument, "projection must keep the output and at least one input");
  }
  std::vector<DimensionRole> dims;
  for (auto d : keep) dims.push_back(t.dim(d));
  if (keep.size() == t.order() && std::is_sorted(keep.begin(), keep.end())) return t;
  if (t.is_identity()) return t;
  std::vector<RowIndex> entries;
  entries.reserve(keep.size() * t.nnz());
  for (std::size_t k = 0; k < t.nnz(); ++k) {
    for (auto d : keep) entries.push_back(t.entry(k, d));
  }
  return ProvTensor::from_leaves(std::move(dims), std::move(entries));
}

ProvTensor compose(const ProvTensor& first, const ProvTensor& second, std::size_t second_dim) {
  if (second_dim == 0 || second_dim >= second.order()) {
    throw Error(ErrorKind::InvalidArgument, "compose: second_dim must name an input dimension");
  }
  const auto& joint_out = first.dim(0);
  const auto& joint_in = second.dim(second_dim);
  if (joint_out.dataset != joint_in.dataset) {
    throw Error(ErrorKind::InvalidArgument, "compose: no shared dataset dimension ('" +
                                                joint_out.dataset + "' vs '" + joint_in.dataset + "')");
  }
  if (joint_out.extent != joint_in.extent) {
    throw Error(ErrorKind::InvalidArgument, "compose: extents differ for dataset '" + joint_out.dataset + "'");
  }
  if (first.is_identity() && second.is_identity()) {
    return ProvTensor::identity(first.dim(1).dataset, second.dim(0).dataset, first.nnz());
  }
  std::vector<DimensionRole> dims{second.dim(0)};
  for (std::size_t d = 1; d < first.order(); ++d) dims.push_back(first.dim(d));
  for (std::size_t d = 1; d < second.order(); ++d) {
    if (d != second_dim) dims.push_back(second.dim(d));
  }
  return ProvTensor::from_leaves(std::move(dims), kernels::compose_leaves(first, second, second_dim));
}

ProvTensor compose(const ProvTensor& first, const ProvTensor& second) {
  auto dims = second.dims_for(first.dim(0).dataset);
  if (dims.empty()) {
    throw Error(ErrorKind::InvalidArgument,
                "compose: '" + first.dim(0).dataset + "' is not an input of the second tensor");
  }
  if (dims.size() > 1) {
    throw Error(ErrorKind::InvalidArgument,
                "compose: '" + first.dim(0).dataset + "' feeds several input dimensions");
  }
  return compose(first, second, dims[0]);
}

DuplicateClasses::DuplicateClasses(std::vector<RowIndex> canonical) : canonical_(std::move(canonical)) {
  std::unordered_map<RowIndex, std::size_t> slot;
  for (std::size_t i = 0; i < canonical_.size(); ++i) {
    const RowIndex c = canonical_[i];
    if (c == i) continue;
    auto [it, inserted] = slot.try_emplace(c, groups_.size());
    if (inserted) groups_.push_back({c, {c}});
    groups_[it->second].second.push_back(static_cast<RowIndex>(i));
    ++duplicate_rows_;
  }
  std::sort(groups_.begin(), groups_.end());
}

std::vector<RowIndex> DuplicateClasses::members(RowIndex row) const {
  const RowIndex c = canonical(row);
  auto it = std::lower_bound(groups_.begin(), groups_.end(), c,
                             [](const auto& g, RowIndex key) { return g.first < key; });
  if (it != groups_.end() && it->first == c) return it->second;
  return {row};
}

RowSet DuplicateClasses::expand(std::span<const RowIndex> rows) const {
  std::vector<RowIndex> out;
  for (RowIndex r : rows) {
    auto m = members(r);
    out.insert(out.end(), m.begin(), m.end());
  }
  return make_row_set(std::move(out));
}

RowSet DuplicateClasses::canonicalize(std::span<const RowIndex> rows) const {
  std::vector<RowIndex> out;
  out.reserve(rows.size());
  for (RowIndex r : rows) out.push_back(canonical(r));
  return make_row_set(std::move(out));
}

DuplicateClasses duplicate_classes(const Dataset& d) {
  const auto hashes = kernels::hash_rows(d);
  std::unordered_map<std::size_t, std::vector<RowIndex>> reps;
  std::vector<RowIndex> canonical(d.row_count());
  for (std::size_t i = 0; i < d.row_count(); ++i) {
    auto& bucket = reps[hashes[i]];
    RowIndex found = static_cast<RowIndex>(i);
    for (RowIndex rep : bucket) {
      if (row_equal(d, rep, i)) {
        found = rep;
        break;
      }
    }
    if (found == i) bucket.push_back(found);
    canonical[i] = found;
  }
  return DuplicateClasses(std::move(canonical));
}

ProvTensor to_set_semantics(const ProvTensor& t, const DuplicateClasses& classes) {
  if (classes.size() != t.dim(0).extent) {
    throw Error(ErrorKind::InvalidArgument, "set semantics: class map does not match the output extent");
  }
  if (!classes.has_duplicates()) return t;
  std::vector<RowIndex> entries;
  entries.reserve(t.order() * t.nnz());
  for (std::size_t k = 0; k < t.nnz(); ++k) {
    entries.push_back(classes.canonical(t.entry(k, 0)));
    for (std::size_t d = 1; d < t.order(); ++d) entries.push_back(t.entry(k, d));
  }
  return ProvTensor::from_leaves(t.dims(), std::move(entries));
}

ProvTensor to_set_semantics(const ProvTensor& t, const Dataset& output) {
  if (t.dim(0).dataset != output.id() || t.dim(0).extent != output.row_count()) {
    throw Error(ErrorKind::InvalidArgument,
                "set semantics: dataset '" + output.id() + "' is not the tensor's output");
  }
  return to_set_semantics(t, duplicate_classes(output));
}

}  // namespace tensprov
