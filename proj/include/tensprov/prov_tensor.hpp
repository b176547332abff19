#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tensprov/dataset.hpp"

namespace tensprov {

// Sorted, duplicate-free set of row indices.
using RowSet = std::vector<RowIndex>;

RowSet make_row_set(std::vector<RowIndex> rows);

enum class Polarity { Input, Output };

struct DimensionRole {
  DatasetId dataset;
  Polarity polarity;
  // Row count of the dataset when the tensor was captured.
  std::size_t extent = 0;

  friend bool operator==(const DimensionRole&, const DimensionRole&) = default;
};

// Flat list of index tuples, `order` entries per tuple.
struct LeafSet {
  std::size_t order = 0;
  std::vector<RowIndex> entries;

  std::size_t size() const { return order ? entries.size() / order : 0; }
  bool empty() const { return entries.empty(); }
  std::span<const RowIndex> tuple(std::size_t k) const {
    return {entries.data() + k * order, order};
  }
  // Lexicographically sorted copy of the tuples, for set comparisons.
  std::vector<std::vector<RowIndex>> sorted_tuples() const;
};

// Counts leaf references dereferenced by slice().
struct AccessCounter {
  std::size_t leaf_refs = 0;
};

// Level-2 nodes of one dimension: row index -> ids of the leaves holding it.
// Stored as sorted keys with CSR offsets into a shared reference array.
class DimIndex {
 public:
  DimIndex() = default;
  static DimIndex build(std::span<const RowIndex> entries, std::size_t order, std::size_t dim);

  std::size_t key_count() const { return keys_.size(); }
  std::size_t ref_count() const { return refs_.size(); }
  std::span<const RowIndex> keys() const { return keys_; }
  std::span<const std::uint32_t> lookup(RowIndex row) const;
  bool contains(RowIndex row) const { return !lookup(row).empty(); }

 private:
  std::vector<RowIndex> keys_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> refs_;
};

// Sparse binary provenance tensor. Dimension 0 is always the output dataset;
// the remaining dimensions are inputs. Leaves are stored once, sorted and
// unique, and every dimension keeps an index of the leaves that mention each
// row. The identity form stores only its size and synthesizes leaves (i, i).
class ProvTensor {
 public:
  ProvTensor() = default;

  static ProvTensor identity(DatasetId input, DatasetId output, std::size_t n);
  // Deduplicates tuples (binary semantics) and validates them against extents.
  static ProvTensor from_leaves(std::vector<DimensionRole> dims, std::vector<RowIndex> entries);

  std::size_t order() const { return dims_.size(); }
  const std::vector<DimensionRole>& dims() const { return dims_; }
  const DimensionRole& dim(std::size_t k) const { return dims_.at(k); }
  bool is_identity() const { return identity_; }

  // Number of non-zero cells (logical for the identity form).
  std::size_t nnz() const { return identity_ ? identity_size_ : leaf_entries_.size() / order(); }

  RowIndex entry(std::size_t leaf, std::size_t dim) const;
  LeafSet leaves() const;
  // Leaf ids holding `row` in dimension `dim`; always empty for the identity
  // form, whose single leaf per row is (row, row).
  std::span<const std::uint32_t> refs(std::size_t dim, RowIndex row) const;

  // Number of level-2 nodes for a dimension.
  std::size_t index_size(std::size_t dim) const;
  bool indexes(std::size_t dim, RowIndex row) const;
  // Rows present at level 2 for a dimension, ascending.
  RowSet indexed_rows(std::size_t dim) const;

  // Input dimensions whose dataset matches `dataset`.
  std::vector<std::size_t> dims_for(const DatasetId& dataset) const;

  // Payload sizes of the backing arrays plus a fixed header:
  //   64 bytes per tensor + 32 bytes per dimension
  //   + 4 bytes per tuple entry + 4 bytes per leaf reference
  //   + 8 bytes per index key (row id and offset).
  // The identity form costs only the fixed part.
  std::size_t memory_bytes() const;

  static constexpr std::size_t kTensorOverhead = 64;
  static constexpr std::size_t kDimOverhead = 32;
  static constexpr std::size_t kTupleEntryBytes = sizeof(RowIndex);
  static constexpr std::size_t kLeafRefBytes = sizeof(std::uint32_t);
  static constexpr std::size_t kIndexEntryBytes = sizeof(RowIndex) + sizeof(std::uint32_t);

  friend LeafSet slice(const ProvTensor& t, std::size_t dim, std::span<const RowIndex> rows,
                       AccessCounter* counter);

 private:
  void check_dim(std::size_t dim) const;

  std::vector<DimensionRole> dims_;
  bool identity_ = false;
  std::size_t identity_size_ = 0;
  std::vector<RowIndex> leaf_entries_;
  std::vector<DimIndex> index_;
};

ProvTensor identity_tensor(const DatasetId& input, const DatasetId& output, std::size_t n);

// Horizontal reduction: output row o keeps input row kept[o]; kept must be
// strictly increasing.
ProvTensor masking_tensor(const DatasetId& input, const DatasetId& output, std::size_t input_rows,
                          std::span<const RowIndex> kept);

struct JoinTriple {
  RowIndex out;
  RowIndex left;
  RowIndex right;
};

// Order-3 tensor with dims (output, left, right). Each output row appears in
// exactly one triple.
ProvTensor join_tensor(const DatasetId& output, std::size_t output_rows, const DatasetId& left,
                       std::size_t left_rows, const DatasetId& right, std::size_t right_rows,
                       std::span<const JoinTriple> triples);

// Two order-2 tensors for output = left rows followed by right rows.
std::pair<ProvTensor, ProvTensor> append_tensors(const DatasetId& output, const DatasetId& left,
                                                 const DatasetId& right, std::size_t n,
                                                 std::size_t m);

struct RowPair {
  RowIndex out;
  RowIndex in;
};

// Horizontal augmentation: arbitrary (output, input) pairs. An output row with
// no pair has no level-2 node.
ProvTensor augmentation_tensor(const DatasetId& input, std::size_t input_rows,
                               const DatasetId& output, std::size_t output_rows,
                               std::span<const RowPair> pairs);

LeafSet slice(const ProvTensor& t, std::size_t dim, std::span<const RowIndex> rows,
              AccessCounter* counter = nullptr);
RowSet project(const LeafSet& leaves, std::size_t dim);

// Order-reducing projection: keeps `keep` dimensions (the first must be 0),
// OR-collapsing the rest.
ProvTensor project_dims(const ProvTensor& t, std::span<const std::size_t> keep);

// Existential contraction of first's output dimension with the input
// dimension `second_dim` of second. Result dims: second's output, first's
// inputs, then second's remaining inputs.
ProvTensor compose(const ProvTensor& first, const ProvTensor& second, std::size_t second_dim);
// Picks the unique input dimension of second whose dataset is first's output.
ProvTensor compose(const ProvTensor& first, const ProvTensor& second);

// Canonical representative (smallest index) of every row's duplicate class.
class DuplicateClasses {
 public:
  DuplicateClasses() = default;
  explicit DuplicateClasses(std::vector<RowIndex> canonical);

  std::size_t size() const { return canonical_.size(); }
  RowIndex canonical(RowIndex row) const { return canonical_.at(row); }
  const std::vector<RowIndex>& canonical() const { return canonical_; }
  bool has_duplicates() const { return !groups_.empty(); }
  std::size_t class_count() const { return canonical_.size() - duplicate_rows_; }

  std::vector<RowIndex> members(RowIndex row) const;
  // Expands each row to its full class.
  RowSet expand(std::span<const RowIndex> rows) const;
  RowSet canonicalize(std::span<const RowIndex> rows) const;

 private:
  std::vector<RowIndex> canonical_;
  // Only classes with more than one member, keyed by their canonical row.
  std::vector<std::pair<RowIndex, std::vector<RowIndex>>> groups_;
  std::size_t duplicate_rows_ = 0;
};

DuplicateClasses duplicate_classes(const Dataset& d);

// Rewrites each output index to its class minimum.
ProvTensor to_set_semantics(const ProvTensor& t, const Dataset& output);
ProvTensor to_set_semantics(const ProvTensor& t, const DuplicateClasses& classes);

inline std::size_t nnz(const ProvTensor& t) { return t.nnz(); }
inline std::size_t memory_bytes(const ProvTensor& t) { return t.memory_bytes(); }

}  // namespace tensprov
