#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ops_internal.hpp"
#include "tensprov/error.hpp"

namespace tensprov {

namespace {

OpDescriptor describe(const OpTarget& target, OpCategory category, std::vector<DatasetId> inputs,
                      OpParams params) {
  OpDescriptor op;
  op.id = target.op_id;
  op.category = category;
  op.name = op_name(params);
  op.inputs = std::move(inputs);
  op.output = target.output;
  op.params = std::move(params);
  return op;
}

CaptureResult one_to_one(const OpTarget& target, const Dataset& d, OpCategory category, Schema schema,
                         std::vector<Row> rows, OpParams params) {
  const std::size_t n = d.row_count();
  CaptureResult r{Dataset(target.output, std::move(schema), std::move(rows)),
                  {{TensorRole::Main, identity_tensor(d.id(), target.output, n)}},
                  describe(target, category, {d.id()}, std::move(params)),
                  {}};
  return r;
}

CaptureResult masked(const OpTarget& target, const Dataset& d, const std::vector<RowIndex>& kept,
                     OpParams params) {
  std::vector<Row> rows;
  rows.reserve(kept.size());
  for (RowIndex i : kept) rows.emplace_back(d.rows()[i]);
  return {Dataset(target.output, d.schema(), std::move(rows)),
          {{TensorRole::Main, masking_tensor(d.id(), target.output, d.row_count(), kept)}},
          describe(target, OpCategory::HorizontalReduction, {d.id()}, std::move(params)),
          {d.row_count(), 0}};
}

AttrBitset augmentation_bits(std::size_t m, std::span<const std::size_t> sources, std::size_t added) {
  std::string bits(m + added, '0');
  for (auto s : sources) bits[s] = '1';
  for (std::size_t k = m; k < m + added; ++k) bits[k] = '1';
  return AttrBitset::vertical_augmentation(bits, m);
}

std::vector<Cell> distinct_values(const Dataset& d, std::size_t column) {
  std::vector<Cell> values;
  for (const auto& row : d.rows()) {
    if (!row[column].is_null()) values.push_back(row[column]);
  }
  std::sort(values.begin(), values.end(), cell_less);
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

RowSet parents(const ProvTensor& t, RowIndex out, std::size_t dim = 1) {
  const RowIndex rows[] = {out};
  return project(slice(t, 0, rows), dim);
}

const ProvTensor* find_role(std::span<const CapturedTensor> tensors, TensorRole role) {
  for (const auto& c : tensors) {
    if (c.role == role) return &c.tensor;
  }
  return nullptr;
}

const ProvTensor& main_tensor(std::span<const CapturedTensor> tensors) {
  const ProvTensor* t = find_role(tensors, TensorRole::Main);
  if (!t) throw Error(ErrorKind::InvalidArgument, "operation has no main provenance tensor");
  return *t;
}

}  // namespace

CaptureResult transform(const OpTarget& target, const Dataset& d, TransformParams params) {
  Schema schema = detail::transform_schema(params, d.schema());
  const auto state = detail::fit_transform(params, d.schema(), &d);
  std::vector<Row> rows;
  rows.reserve(d.row_count());
  for (const auto& row : d.rows()) rows.push_back(detail::apply_transform(params, state, row));
  const bool contextual = is_contextual(params.fn);
  auto r = one_to_one(target, d, OpCategory::DataTransformation, std::move(schema), std::move(rows),
                      std::move(params));
  r.descriptor.contextual = contextual;
  return r;
}

CaptureResult select_columns(const OpTarget& target, const Dataset& d, std::vector<std::size_t> kept) {
  SelectParams p{std::move(kept)};
  Schema schema = detail::select_schema(p, d.schema());
  std::vector<Row> rows;
  rows.reserve(d.row_count());
  for (const auto& row : d.rows()) rows.push_back(detail::select_row(p, row));
  AttrMapping mapping = AttrMapping::kept_order(d.attr_count(), p.kept);
  auto r = one_to_one(target, d, OpCategory::VerticalReduction, std::move(schema), std::move(rows), std::move(p));
  r.descriptor.bitsets.push_back(std::move(mapping));
  return r;
}

CaptureResult drop_columns(const OpTarget& target, const Dataset& d, std::span<const std::size_t> drop) {
  if (drop.empty()) throw Error(ErrorKind::InvalidArgument, "drop: no columns given");
  std::vector<bool> dropped(d.attr_count(), false);
  for (auto c : drop) {
    detail::check_column(d.schema(), c, "drop");
    dropped[c] = true;
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < d.attr_count(); ++i) {
    if (!dropped[i]) kept.push_back(i);
  }
  return select_columns(target, d, std::move(kept));
}

CaptureResult one_hot_encode(const OpTarget& target, const Dataset& d, std::size_t column,
                             std::size_t cardinality_cap) {
  detail::check_column(d.schema(), column, "one-hot");
  const Attribute& a = d.schema()[column];
  if (a.type == CellType::Real) {
    throw Error(ErrorKind::TypeMismatch, "one-hot: column '" + a.name + "' is real-valued");
  }
  OneHotParams p{column, cardinality_cap, distinct_values(d, column)};
  if (p.categories.size() > cardinality_cap) {
    throw Error(ErrorKind::InvalidArgument, "one-hot: column '" + a.name + "' has " +
                                                std::to_string(p.categories.size()) +
                                                " distinct values, above the cap of " +
                                                std::to_string(cardinality_cap));
  }
  Schema schema = detail::one_hot_schema(p, d.schema());
  std::vector<Row> rows;
  rows.reserve(d.row_count());
  for (const auto& row : d.rows()) rows.push_back(detail::one_hot_row(p, row));
  const std::size_t src[] = {column};
  AttrMapping mapping = AttrMapping::plain(augmentation_bits(d.attr_count(), src, p.categories.size()));
  auto r = one_to_one(target, d, OpCategory::VerticalAugmentation, std::move(schema), std::move(rows),
                      std::move(p));
  r.descriptor.bitsets.push_back(std::move(mapping));
  return r;
}

CaptureResult string_index(const OpTarget& target, const Dataset& d, std::size_t column) {
  detail::check_column(d.schema(), column, "string-index");
  StringIndexParams p{column, distinct_values(d, column)};
  Schema schema = detail::string_index_schema(p, d.schema());
  std::vector<Row> rows;
  rows.reserve(d.row_count());
  for (const auto& row : d.rows()) rows.push_back(detail::string_index_row(p, row));
  const std::size_t src[] = {column};
  AttrMapping mapping = AttrMapping::plain(augmentation_bits(d.attr_count(), src, 1));
  auto r = one_to_one(target, d, OpCategory::VerticalAugmentation, std::move(schema), std::move(rows),
                      std::move(p));
  r.descriptor.bitsets.push_back(std::move(mapping));
  return r;
}

CaptureResult derive_columns(const OpTarget& target, const Dataset& d, DeriveParams params) {
  Schema schema = detail::derive_schema(params, d.schema());
  std::vector<Row> rows;
  rows.reserve(d.row_count());
  for (const auto& row : d.rows()) rows.push_back(detail::derive_row(params, d.schema(), row));
  AttrMapping mapping =
      AttrMapping::plain(augmentation_bits(d.attr_count(), params.sources, params.functions.size()));
  auto r = one_to_one(target, d, OpCategory::VerticalAugmentation, std::move(schema), std::move(rows),
                      std::move(params));
  r.descriptor.bitsets.push_back(std::move(mapping));
  return r;
}

CaptureResult filter(const OpTarget& target, const Dataset& d, Predicate predicate) {
  detail::check_predicate(predicate, d.schema());
  std::vector<RowIndex> kept;
  for (std::size_t i = 0; i < d.row_count(); ++i) {
    if (detail::evaluate(predicate, d.row(i))) kept.push_back(static_cast<RowIndex>(i));
  }
  return masked(target, d, kept, FilterParams{std::move(predicate)});
}

CaptureResult drop_nulls(const OpTarget& target, const Dataset& d, std::vector<std::size_t> columns) {
  DropNullParams p{std::move(columns)};
  for (auto c : p.columns) detail::check_column(d.schema(), c, "dropna");
  std::vector<RowIndex> kept;
  for (std::size_t i = 0; i < d.row_count(); ++i) {
    if (detail::keep_null_free(p, d.row(i))) kept.push_back(static_cast<RowIndex>(i));
  }
  return masked(target, d, kept, std::move(p));
}

CaptureResult sample(const OpTarget& target, const Dataset& d, SampleParams params) {
  if (!(params.fraction >= 0.0 && params.fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "sample: fraction must lie in [0, 1]");
  }
  std::vector<RowIndex> kept;
  for (std::size_t i = 0; i < d.row_count(); ++i) {
    if (detail::keep_sampled(params, static_cast<RowIndex>(i))) kept.push_back(static_cast<RowIndex>(i));
  }
  return masked(target, d, kept, params);
}

CaptureResult oversample(const OpTarget& target, const Dataset& d, OversampleParams params) {
  detail::check_column(d.schema(), params.target, "oversample");
  std::map<Cell, std::vector<RowIndex>, decltype(&cell_less)> classes(cell_less);
  for (std::size_t i = 0; i < d.row_count(); ++i) {
    const Cell& label = d.cell(i, params.target);
    if (!label.is_null()) classes[label].push_back(static_cast<RowIndex>(i));
  }
  if (classes.empty()) throw Error(ErrorKind::InvalidArgument, "oversample: target column has no labels");
  std::size_t largest = 0;
  for (const auto& [label, members] : classes) largest = std::max(largest, members.size());

  std::vector<Row> rows(d.rows());
  std::vector<RowPair> pairs;
  pairs.reserve(d.row_count());
  for (std::size_t i = 0; i < d.row_count(); ++i) {
    pairs.push_back({static_cast<RowIndex>(i), static_cast<RowIndex>(i)});
  }
  for (const auto& [label, members] : classes) {
    for (std::size_t k = members.size(); k < largest; ++k) {
      const auto o = static_cast<RowIndex>(rows.size());
      RowIndex a = members[mix_seed(params.seed, o, 0) % members.size()];
      RowIndex b = a;
      if (params.strategy == OversampleStrategy::Interpolate) {
        b = members[mix_seed(params.seed, o, 1) % members.size()];
        if (b < a) std::swap(a, b);
      }
      const std::span<const Cell> other = b == a ? std::span<const Cell>{} : d.row(b);
      rows.push_back(detail::generate_row(params, d.schema(), d.row(a), other, o));
      pairs.push_back({o, a});
      if (b != a) pairs.push_back({o, b});
    }
  }
  const std::size_t out_rows = rows.size();
  return {Dataset(target.output, d.schema(), std::move(rows)),
          {{TensorRole::Main, augmentation_tensor(d.id(), d.row_count(), target.output, out_rows, pairs)}},
          describe(target, OpCategory::HorizontalAugmentation, {d.id()}, params),
          {d.row_count(), 0}};
}

CaptureResult join(const OpTarget& target, const Dataset& left, const Dataset& right, JoinParams params) {
  const auto layout = detail::join_layout(left.schema(), right.schema(), params);

  // Active capture: every input row carries an injected identifier column
  // (__tp_lid / __tp_rid); the join emits the pair next to each output row and
  // provenance is read from those identifiers alone.
  struct Tagged {
    RowIndex id;
    std::span<const Cell> row;
  };
  auto key_of = [&](std::span<const Cell> row, bool left_side) {
    Row key;
    key.reserve(params.keys.size());
    for (auto [lk, rk] : params.keys) {
      const Cell& c = row[left_side ? lk : rk];
      key.push_back(c.is_integer() ? Cell::real(static_cast<double>(c.as_integer())) : c);
    }
    return key;
  };
  auto has_null = [](const Row& key) {
    return std::any_of(key.begin(), key.end(), [](const Cell& c) { return c.is_null(); });
  };
  struct RowHash {
    std::size_t operator()(const Row& r) const { return hash_row(r); }
  };
  std::unordered_map<Row, std::vector<Tagged>, RowHash> build;
  build.reserve(right.row_count());
  for (std::size_t j = 0; j < right.row_count(); ++j) {
    Row key = key_of(right.row(j), false);
    if (has_null(key)) continue;
    build[std::move(key)].push_back({static_cast<RowIndex>(j), right.row(j)});
  }

  const bool keep_left = params.kind == JoinKind::Left || params.kind == JoinKind::Full;
  const bool keep_right = params.kind == JoinKind::Right || params.kind == JoinKind::Full;
  std::vector<Row> rows;
  std::vector<JoinTriple> triples;
  std::vector<RowPair> left_only;
  std::vector<RowPair> right_only;
  std::vector<bool> right_matched(right.row_count(), false);
  CaptureStats stats;
  triples.reserve(left.row_count());
  rows.reserve(left.row_count());
  for (std::size_t i = 0; i < left.row_count(); ++i) {
    const Tagged l{static_cast<RowIndex>(i), left.row(i)};
    const Row key = key_of(l.row, true);
    const auto it = has_null(key) ? build.end() : build.find(key);
    if (it == build.end()) {
      if (keep_left) {
        const auto o = static_cast<RowIndex>(rows.size());
        rows.push_back(detail::join_row(layout, l.row, {}));
        left_only.push_back({o, l.id});
        ++stats.identifier_reads;
      }
      continue;
    }
    for (const Tagged& r : it->second) {
      const auto o = static_cast<RowIndex>(rows.size());
      rows.push_back(detail::join_row(layout, l.row, r.row));
      triples.push_back({o, l.id, r.id});
      right_matched[r.id] = true;
      stats.identifier_reads += 2;
    }
  }
  if (keep_right) {
    for (std::size_t j = 0; j < right.row_count(); ++j) {
      if (right_matched[j]) continue;
      const auto o = static_cast<RowIndex>(rows.size());
      rows.push_back(detail::join_row(layout, {}, right.row(j)));
      right_only.push_back({o, static_cast<RowIndex>(j)});
      ++stats.identifier_reads;
    }
  }

  const std::size_t out_rows = rows.size();
  CaptureResult r{Dataset(target.output, layout.schema, std::move(rows)), {}, {}, stats};
  r.tensors.push_back({TensorRole::Main, join_tensor(target.output, out_rows, left.id(), left.row_count(),
                                                     right.id(), right.row_count(), triples)});
  if (keep_left) {
    r.tensors.push_back(
        {TensorRole::LeftSide, augmentation_tensor(left.id(), left.row_count(), target.output, out_rows, left_only)});
  }
  if (keep_right) {
    r.tensors.push_back({TensorRole::RightSide,
                         augmentation_tensor(right.id(), right.row_count(), target.output, out_rows, right_only)});
  }
  r.descriptor = describe(target, OpCategory::Join, {left.id(), right.id()}, std::move(params));
  r.descriptor.bitsets = detail::join_mappings(layout, left.attr_count(), right.attr_count());
  return r;
}

CaptureResult append(const OpTarget& target, const Dataset& left, const Dataset& right) {
  const auto layout = detail::append_layout(left.schema(), right.schema());
  std::vector<Row> rows;
  rows.reserve(left.row_count() + right.row_count());
  for (const auto& row : left.rows()) rows.push_back(detail::append_row(layout, TensorRole::LeftSide, row));
  for (const auto& row : right.rows()) rows.push_back(detail::append_row(layout, TensorRole::RightSide, row));
  auto [lt, rt] = append_tensors(target.output, left.id(), right.id(), left.row_count(), right.row_count());
  CaptureResult r{Dataset(target.output, layout.schema, std::move(rows)),
                  {{TensorRole::LeftSide, std::move(lt)}, {TensorRole::RightSide, std::move(rt)}},
                  describe(target, OpCategory::Append, {left.id(), right.id()}, AppendParams{}),
                  {left.row_count() + right.row_count(), 0}};
  r.descriptor.bitsets = detail::append_mappings(layout, right.attr_count());
  return r;
}

CaptureResult execute(const OpTarget& target, const OpParams& params, std::span<const Dataset* const> inputs) {
  const bool binary = std::holds_alternative<JoinParams>(params) || std::holds_alternative<AppendParams>(params);
  const std::size_t expected = binary ? 2 : 1;
  if (inputs.size() != expected) {
    throw Error(ErrorKind::InvalidArgument, op_name(params) + " takes " + std::to_string(expected) +
                                                " input(s), got " + std::to_string(inputs.size()));
  }
  for (const Dataset* d : inputs) {
    if (!d) throw Error(ErrorKind::InvalidArgument, op_name(params) + ": missing input dataset");
  }
  const Dataset& d = *inputs[0];
  return std::visit(
      [&](const auto& p) -> CaptureResult {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TransformParams>) {
          return transform(target, d, p);
        } else if constexpr (std::is_same_v<P, SelectParams>) {
          return select_columns(target, d, p.kept);
        } else if constexpr (std::is_same_v<P, OneHotParams>) {
          return one_hot_encode(target, d, p.column, p.cardinality_cap);
        } else if constexpr (std::is_same_v<P, StringIndexParams>) {
          return string_index(target, d, p.column);
        } else if constexpr (std::is_same_v<P, DeriveParams>) {
          return derive_columns(target, d, p);
        } else if constexpr (std::is_same_v<P, FilterParams>) {
          return filter(target, d, p.predicate);
        } else if constexpr (std::is_same_v<P, DropNullParams>) {
          return drop_nulls(target, d, p.columns);
        } else if constexpr (std::is_same_v<P, SampleParams>) {
          return sample(target, d, p);
        } else if constexpr (std::is_same_v<P, OversampleParams>) {
          return oversample(target, d, p);
        } else if constexpr (std::is_same_v<P, JoinParams>) {
          return join(target, d, *inputs[1], p);
        } else {
          return append(target, d, *inputs[1]);
        }
      },
      params);
}

std::string op_name(const OpParams& params) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TransformParams>) return std::string(to_string(p.fn));
        else if constexpr (std::is_same_v<P, SelectParams>) return "select-columns";
        else if constexpr (std::is_same_v<P, OneHotParams>) return "one-hot";
        else if constexpr (std::is_same_v<P, StringIndexParams>) return "string-index";
        else if constexpr (std::is_same_v<P, DeriveParams>) return "derive";
        else if constexpr (std::is_same_v<P, FilterParams>) return "filter";
        else if constexpr (std::is_same_v<P, DropNullParams>) return "dropna";
        else if constexpr (std::is_same_v<P, SampleParams>) return "sample";
        else if constexpr (std::is_same_v<P, OversampleParams>) return "oversample";
        else if constexpr (std::is_same_v<P, JoinParams>) return "join";
        else return "append";
      },
      params);
}

// ---- replay -----------------------------------------------------------------

std::span<const Cell> InputRows::row(RowIndex i) const {
  if (full) return full->row(i);
  auto it = rows.find(i);
  if (it == rows.end()) {
    throw Error(ErrorKind::NotFound, "replay: input row " + std::to_string(i) + " is not available");
  }
  return it->second;
}

std::vector<RowSet> replay_requirements(const OpDescriptor& op, std::span<const CapturedTensor> tensors,
                                        std::span<const RowIndex> out_rows) {
  std::vector<RowSet> need(op.inputs.size());
  switch (op.category) {
    case OpCategory::Join: {
      const LeafSet hit = slice(main_tensor(tensors), 0, out_rows);
      need[0] = project(hit, 1);
      need[1] = project(hit, 2);
      if (const auto* t = find_role(tensors, TensorRole::LeftSide)) {
        auto extra = project(slice(*t, 0, out_rows), 1);
        need[0].insert(need[0].end(), extra.begin(), extra.end());
        need[0] = make_row_set(std::move(need[0]));
      }
      if (const auto* t = find_role(tensors, TensorRole::RightSide)) {
        auto extra = project(slice(*t, 0, out_rows), 1);
        need[1].insert(need[1].end(), extra.begin(), extra.end());
        need[1] = make_row_set(std::move(need[1]));
      }
      break;
    }
    case OpCategory::Append:
      need[0] = project(slice(*find_role(tensors, TensorRole::LeftSide), 0, out_rows), 1);
      need[1] = project(slice(*find_role(tensors, TensorRole::RightSide), 0, out_rows), 1);
      break;
    default:
      need[0] = project(slice(main_tensor(tensors), 0, out_rows), 1);
      break;
  }
  return need;
}

std::vector<Row> replay(const OpDescriptor& op, std::span<const CapturedTensor> tensors,
                        std::span<const InputRows> inputs, std::span<const RowIndex> out_rows) {
  if (inputs.size() != op.inputs.size()) {
    throw Error(ErrorKind::InvalidArgument, "replay of " + op.id + ": wrong number of inputs");
  }
  const InputRows& in = inputs[0];
  std::vector<Row> out;
  out.reserve(out_rows.size());
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TransformParams>) {
          const auto state = detail::fit_transform(p, in.schema, in.full);
          for (RowIndex o : out_rows) out.push_back(detail::apply_transform(p, state, in.row(o)));
        } else if constexpr (std::is_same_v<P, SelectParams>) {
          for (RowIndex o : out_rows) out.push_back(detail::select_row(p, in.row(o)));
        } else if constexpr (std::is_same_v<P, OneHotParams>) {
          for (RowIndex o : out_rows) out.push_back(detail::one_hot_row(p, in.row(o)));
        } else if constexpr (std::is_same_v<P, StringIndexParams>) {
          for (RowIndex o : out_rows) out.push_back(detail::string_index_row(p, in.row(o)));
        } else if constexpr (std::is_same_v<P, DeriveParams>) {
          for (RowIndex o : out_rows) out.push_back(detail::derive_row(p, in.schema, in.row(o)));
        } else if constexpr (std::is_same_v<P, FilterParams> || std::is_same_v<P, DropNullParams> ||
                             std::is_same_v<P, SampleParams>) {
          const ProvTensor& t = main_tensor(tensors);
          for (RowIndex o : out_rows) {
            const RowSet src = parents(t, o);
            if (src.size() != 1) throw Error(ErrorKind::OutOfRange, "replay: no source for row " + std::to_string(o));
            const auto row = in.row(src[0]);
            out.emplace_back(row.begin(), row.end());
          }
        } else if constexpr (std::is_same_v<P, OversampleParams>) {
          const ProvTensor& t = main_tensor(tensors);
          const std::size_t originals = t.dim(1).extent;
          for (RowIndex o : out_rows) {
            const RowSet src = parents(t, o);
            if (src.empty()) throw Error(ErrorKind::OutOfRange, "replay: no source for row " + std::to_string(o));
            if (o < originals) {
              const auto row = in.row(src[0]);
              out.emplace_back(row.begin(), row.end());
            } else {
              const std::span<const Cell> other = src.size() > 1 ? in.row(src[1]) : std::span<const Cell>{};
              out.push_back(detail::generate_row(p, in.schema, in.row(src[0]), other, o));
            }
          }
        } else if constexpr (std::is_same_v<P, JoinParams>) {
          const auto layout = detail::join_layout(inputs[0].schema, inputs[1].schema, p);
          const ProvTensor& t = main_tensor(tensors);
          const ProvTensor* lside = find_role(tensors, TensorRole::LeftSide);
          const ProvTensor* rside = find_role(tensors, TensorRole::RightSide);
          for (RowIndex o : out_rows) {
            const RowIndex one[] = {o};
            const LeafSet hit = slice(t, 0, one);
            if (!hit.empty()) {
              out.push_back(detail::join_row(layout, inputs[0].row(hit.tuple(0)[1]), inputs[1].row(hit.tuple(0)[2])));
              continue;
            }
            if (lside) {
              if (auto src = parents(*lside, o); !src.empty()) {
                out.push_back(detail::join_row(layout, inputs[0].row(src[0]), {}));
                continue;
              }
            }
            if (rside) {
              if (auto src = parents(*rside, o); !src.empty()) {
                out.push_back(detail::join_row(layout, {}, inputs[1].row(src[0])));
                continue;
              }
            }
            throw Error(ErrorKind::OutOfRange, "replay: no source for join row " + std::to_string(o));
          }
        } else {
          const auto layout = detail::append_layout(inputs[0].schema, inputs[1].schema);
          const ProvTensor& lt = *find_role(tensors, TensorRole::LeftSide);
          const ProvTensor& rt = *find_role(tensors, TensorRole::RightSide);
          for (RowIndex o : out_rows) {
            if (auto src = parents(lt, o); !src.empty()) {
              out.push_back(detail::append_row(layout, TensorRole::LeftSide, inputs[0].row(src[0])));
            } else if (auto rsrc = parents(rt, o); !rsrc.empty()) {
              out.push_back(detail::append_row(layout, TensorRole::RightSide, inputs[1].row(rsrc[0])));
            } else {
              throw Error(ErrorKind::OutOfRange, "replay: no source for append row " + std::to_string(o));
            }
          }
        }
      },
      op.params);
  return out;
}

}  // namespace tensprov
