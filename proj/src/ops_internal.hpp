#pragma once

// Row-level kernels shared by the executors and by record-level replay, so a
// recomputed row is produced by exactly the code that produced it originally.

#include <span>
#include <vector>

#include "tensprov/ops.hpp"

namespace tensprov::detail {

void check_column(const Schema& s, std::size_t col, std::string_view what);
std::string unique_name(const Schema& taken, std::vector<Attribute>& pending, std::string name);

struct TransformState {
  // Indexed like TransformParams::columns.
  std::vector<Cell> fill;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<std::vector<double>> cuts;
  CellType map_type = CellType::Text;
};

Schema transform_schema(const TransformParams& p, const Schema& in);
// `full` may be null for localized functions; contextual ones need it.
TransformState fit_transform(const TransformParams& p, const Schema& in, const Dataset* full);
Row apply_transform(const TransformParams& p, const TransformState& st, std::span<const Cell> row);

Schema select_schema(const SelectParams& p, const Schema& in);
Row select_row(const SelectParams& p, std::span<const Cell> row);

Schema one_hot_schema(const OneHotParams& p, const Schema& in);
Row one_hot_row(const OneHotParams& p, std::span<const Cell> row);

Schema string_index_schema(const StringIndexParams& p, const Schema& in);
Row string_index_row(const StringIndexParams& p, std::span<const Cell> row);

Schema derive_schema(const DeriveParams& p, const Schema& in);
Row derive_row(const DeriveParams& p, const Schema& in, std::span<const Cell> row);

void check_predicate(const Predicate& p, const Schema& in);
bool evaluate(const Predicate& p, std::span<const Cell> row);
bool keep_null_free(const DropNullParams& p, std::span<const Cell> row);
bool keep_sampled(const SampleParams& p, RowIndex row);

// Generated oversampling row `out`. `other` is empty unless the row blends
// two parents; `base` is the lower-indexed parent.
Row generate_row(const OversampleParams& p, const Schema& schema, std::span<const Cell> base,
                 std::span<const Cell> other, RowIndex out);

struct ColumnSource {
  enum Side { Left, Right } side;
  std::size_t column;
  // Key column: value taken from the right side when the left row is missing.
  std::optional<std::size_t> coalesce_right;
};

struct JoinLayout {
  Schema schema;
  std::vector<ColumnSource> columns;
};

JoinLayout join_layout(const Schema& left, const Schema& right, const JoinParams& p);
Row join_row(const JoinLayout& layout, std::span<const Cell> left, std::span<const Cell> right);
// Side mappings over the output schema: left then right.
std::vector<AttrMapping> join_mappings(const JoinLayout& layout, std::size_t left_attrs,
                                       std::size_t right_attrs);

struct AppendLayout {
  Schema schema;
  std::size_t left_attrs = 0;
  // Output position for every right attribute.
  std::vector<std::size_t> right_positions;
};

AppendLayout append_layout(const Schema& left, const Schema& right);
Row append_row(const AppendLayout& layout, TensorRole side, std::span<const Cell> row);
std::vector<AttrMapping> append_mappings(const AppendLayout& layout, std::size_t right_attrs);

}  // namespace tensprov::detail
