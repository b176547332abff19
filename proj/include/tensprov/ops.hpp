#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "tensprov/attr_bitset.hpp"
#include "tensprov/dataset.hpp"
#include "tensprov/prov_tensor.hpp"

namespace tensprov {

enum class OpCategory {
  DataTransformation,
  VerticalReduction,
  VerticalAugmentation,
  HorizontalReduction,
  HorizontalAugmentation,
  Join,
  Append,
};

std::string_view to_string(OpCategory c);
OpCategory parse_op_category(std::string_view name);

// ---- parameters -----------------------------------------------------------

enum class TransformFn {
  ImputeMean,
  ImputeMedian,
  ImputeMode,
  ImputeConstant,
  Binarize,
  NormalizeMinMax,
  Discretize,
  ValueMap,
};

std::string_view to_string(TransformFn fn);
std::optional<TransformFn> parse_transform_fn(std::string_view name);
// Whole-column statistics needed: mean/median/mode imputation, min-max
// normalization and quantile discretization.
bool is_contextual(TransformFn fn);

struct TransformParams {
  TransformFn fn = TransformFn::ImputeMean;
  std::vector<std::size_t> columns;
  double threshold = 0.0;   // binarize: value > threshold -> 1
  std::size_t bins = 4;     // discretize: quantile bins
  Cell constant;            // impute-constant
  std::vector<std::pair<Cell, Cell>> mapping;  // value-map: from -> to
};

// Vertical reduction. `kept` lists surviving input positions in output order.
struct SelectParams {
  std::vector<std::size_t> kept;
};

struct OneHotParams {
  std::size_t column = 0;
  std::size_t cardinality_cap = 64;
  // Fitted at execution: distinct non-null values, ascending.
  std::vector<Cell> categories;
};

struct StringIndexParams {
  std::size_t column = 0;
  std::vector<Cell> categories;  // fitted, ascending
};

enum class DeriveFn { Sum, Product, Mean, Min, Max, Concat };
std::string_view to_string(DeriveFn fn);
DeriveFn parse_derive_fn(std::string_view name);

// Space transformation: every new column is computed from the same sources.
struct DeriveParams {
  std::vector<std::size_t> sources;
  std::vector<DeriveFn> functions;
  std::vector<std::string> names;  // defaults to derived_<k>
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge, IsNull, NotNull };
std::string_view to_string(CompareOp op);
CompareOp parse_compare_op(std::string_view op);

struct Comparison {
  std::size_t column = 0;
  CompareOp op = CompareOp::Eq;
  Cell value;
};

// Conjunction of comparisons; the empty predicate keeps every row.
struct Predicate {
  std::vector<Comparison> all_of;
};

struct FilterParams {
  Predicate predicate;
};

struct DropNullParams {
  std::vector<std::size_t> columns;  // empty: all columns
};

struct SampleParams {
  double fraction = 1.0;
  std::uint64_t seed = 0;
};

enum class OversampleStrategy { DuplicateMinority, NoisyDuplicate, Interpolate };
std::string_view to_string(OversampleStrategy s);
OversampleStrategy parse_oversample_strategy(std::string_view name);

struct OversampleParams {
  std::size_t target = 0;
  OversampleStrategy strategy = OversampleStrategy::DuplicateMinority;
  double sigma = 0.1;
  std::uint64_t seed = 0;
};

enum class JoinKind { Inner, Left, Right, Full };
std::string_view to_string(JoinKind k);
JoinKind parse_join_kind(std::string_view name);

struct JoinParams {
  std::vector<std::pair<std::size_t, std::size_t>> keys;  // (left attr, right attr)
  JoinKind kind = JoinKind::Inner;
};

struct AppendParams {};

using OpParams = std::variant<TransformParams, SelectParams, OneHotParams, StringIndexParams,
                              DeriveParams, FilterParams, DropNullParams, SampleParams,
                              OversampleParams, JoinParams, AppendParams>;

// ---- descriptors and capture results --------------------------------------

struct OpDescriptor {
  std::string id;
  OpCategory category = OpCategory::DataTransformation;
  std::string name;
  bool contextual = false;
  std::vector<DatasetId> inputs;
  DatasetId output;
  // VR / VA: one mapping. Join / append: left then right.
  std::vector<AttrMapping> bitsets;
  OpParams params;
};

// Which input a tensor relates the output to. Join keeps its order-3 tensor as
// Main plus order-2 side tensors for outer rows with a missing partner;
// append has one side tensor per input.
enum class TensorRole { Main, LeftSide, RightSide };
std::string_view to_string(TensorRole r);

struct CapturedTensor {
  TensorRole role = TensorRole::Main;
  ProvTensor tensor;
};

// Identifier columns conceptually attached to join inputs during capture.
inline constexpr std::string_view kInjectedLeftId = "__tp_lid";
inline constexpr std::string_view kInjectedRightId = "__tp_rid";

struct CaptureStats {
  // Cells read to build provenance, split by injected identifier columns and
  // user columns.
  std::size_t identifier_reads = 0;
  std::size_t user_column_reads = 0;
};

struct CaptureResult {
  Dataset output;
  std::vector<CapturedTensor> tensors;
  OpDescriptor descriptor;
  CaptureStats stats;
};

struct OpTarget {
  std::string op_id;
  DatasetId output;
};

// ---- executors --------------------------------------------------------------

CaptureResult transform(const OpTarget& target, const Dataset& d, TransformParams params);
CaptureResult drop_columns(const OpTarget& target, const Dataset& d, std::span<const std::size_t> drop);
CaptureResult select_columns(const OpTarget& target, const Dataset& d, std::vector<std::size_t> kept);
CaptureResult one_hot_encode(const OpTarget& target, const Dataset& d, std::size_t column,
                             std::size_t cardinality_cap = 64);
CaptureResult string_index(const OpTarget& target, const Dataset& d, std::size_t column);
CaptureResult derive_columns(const OpTarget& target, const Dataset& d, DeriveParams params);
CaptureResult filter(const OpTarget& target, const Dataset& d, Predicate predicate);
CaptureResult drop_nulls(const OpTarget& target, const Dataset& d, std::vector<std::size_t> columns);
CaptureResult sample(const OpTarget& target, const Dataset& d, SampleParams params);
CaptureResult oversample(const OpTarget& target, const Dataset& d, OversampleParams params);
CaptureResult join(const OpTarget& target, const Dataset& left, const Dataset& right, JoinParams params);
CaptureResult append(const OpTarget& target, const Dataset& left, const Dataset& right);

// Dispatches on the parameter alternative. `inputs` holds one dataset, or two
// for join and append.
CaptureResult execute(const OpTarget& target, const OpParams& params,
                      std::span<const Dataset* const> inputs);

// Registry name for a parameter set (e.g. "impute-mean", "filter", "join").
std::string op_name(const OpParams& params);

// ---- record-level replay ----------------------------------------------------

// Rows of one input available to replay: either the full materialized
// dataset or a sparse subset keyed by row index.
struct InputRows {
  Schema schema;
  const Dataset* full = nullptr;
  std::unordered_map<RowIndex, Row> rows;

  std::span<const Cell> row(RowIndex i) const;
};

// Input rows (per input) that replaying `out_rows` reads.
std::vector<RowSet> replay_requirements(const OpDescriptor& op, std::span<const CapturedTensor> tensors,
                                        std::span<const RowIndex> out_rows);

// Recomputes the given output rows from their provenance-related inputs.
// Contextual operations need the full input in `inputs`.
std::vector<Row> replay(const OpDescriptor& op, std::span<const CapturedTensor> tensors,
                        std::span<const InputRows> inputs, std::span<const RowIndex> out_rows);

// Counter-based mixing used for every seeded random choice, so any generated
// row can be reproduced from (seed, row index) alone.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);
// Uniform in [0, 1).
double unit_uniform(std::uint64_t bits);

}  // namespace tensprov
