#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "ops_internal.hpp"
#include "tensprov/error.hpp"

namespace tensprov {

std::string_view to_string(OpCategory c) {
  switch (c) {
    case OpCategory::DataTransformation: return "data-transformation";
    case OpCategory::VerticalReduction: return "vertical-reduction";
    case OpCategory::VerticalAugmentation: return "vertical-augmentation";
    case OpCategory::HorizontalReduction: return "horizontal-reduction";
    case OpCategory::HorizontalAugmentation: return "horizontal-augmentation";
    case OpCategory::Join: return "join";
    case OpCategory::Append: return "append";
  }
  return "unknown";
}

OpCategory parse_op_category(std::string_view name) {
  for (auto c : {OpCategory::DataTransformation, OpCategory::VerticalReduction,
                 OpCategory::VerticalAugmentation, OpCategory::HorizontalReduction,
                 OpCategory::HorizontalAugmentation, OpCategory::Join, OpCategory::Append}) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorKind::Parse, "unknown operation category '" + std::string(name) + "'");
}

std::string_view to_string(TransformFn fn) {
  switch (fn) {
    case TransformFn::ImputeMean: return "impute-mean";
    case TransformFn::ImputeMedian: return "impute-median";
    case TransformFn::ImputeMode: return "impute-mode";
    case TransformFn::ImputeConstant: return "impute-constant";
    case TransformFn::Binarize: return "binarize";
    case TransformFn::NormalizeMinMax: return "normalize-minmax";
    case TransformFn::Discretize: return "discretize";
    case TransformFn::ValueMap: return "value-map";
  }
  return "unknown";
}

std::optional<TransformFn> parse_transform_fn(std::string_view name) {
  for (auto fn : {TransformFn::ImputeMean, TransformFn::ImputeMedian, TransformFn::ImputeMode,
                  TransformFn::ImputeConstant, TransformFn::Binarize, TransformFn::NormalizeMinMax,
                  TransformFn::Discretize, TransformFn::ValueMap}) {
    if (to_string(fn) == name) return fn;
  }
  return std::nullopt;
}

bool is_contextual(TransformFn fn) {
  switch (fn) {
    case TransformFn::ImputeMean:
    case TransformFn::ImputeMedian:
    case TransformFn::ImputeMode:
    case TransformFn::NormalizeMinMax:
    case TransformFn::Discretize:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(DeriveFn fn) {
  switch (fn) {
    case DeriveFn::Sum: return "sum";
    case DeriveFn::Product: return "product";
    case DeriveFn::Mean: return "mean";
    case DeriveFn::Min: return "min";
    case DeriveFn::Max: return "max";
    case DeriveFn::Concat: return "concat";
  }
  return "unknown";
}

DeriveFn parse_derive_fn(std::string_view name) {
  for (auto fn : {DeriveFn::Sum, DeriveFn::Product, DeriveFn::Mean, DeriveFn::Min, DeriveFn::Max,
                  DeriveFn::Concat}) {
    if (to_string(fn) == name) return fn;
  }
  throw Error(ErrorKind::Parse, "unknown derive function '" + std::string(name) + "'");
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::IsNull: return "is_null";
    case CompareOp::NotNull: return "not_null";
  }
  return "?";
}

CompareOp parse_compare_op(std::string_view op) {
  for (auto o : {CompareOp::Eq, CompareOp::Ne, CompareOp::Lt, CompareOp::Le, CompareOp::Gt,
                 CompareOp::Ge, CompareOp::IsNull, CompareOp::NotNull}) {
    if (to_string(o) == op) return o;
  }
  if (op == "=") return CompareOp::Eq;
  throw Error(ErrorKind::Parse, "unknown comparison operator '" + std::string(op) + "'");
}

std::string_view to_string(OversampleStrategy s) {
  switch (s) {
    case OversampleStrategy::DuplicateMinority: return "duplicate-minority";
    case OversampleStrategy::NoisyDuplicate: return "noisy-duplicate";
    case OversampleStrategy::Interpolate: return "interpolate";
  }
  return "unknown";
}

OversampleStrategy parse_oversample_strategy(std::string_view name) {
  for (auto s : {OversampleStrategy::DuplicateMinority, OversampleStrategy::NoisyDuplicate,
                 OversampleStrategy::Interpolate}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::Parse, "unknown oversampling strategy '" + std::string(name) + "'");
}

std::string_view to_string(JoinKind k) {
  switch (k) {
    case JoinKind::Inner: return "inner";
    case JoinKind::Left: return "left";
    case JoinKind::Right: return "right";
    case JoinKind::Full: return "full";
  }
  return "unknown";
}

JoinKind parse_join_kind(std::string_view name) {
  for (auto k : {JoinKind::Inner, JoinKind::Left, JoinKind::Right, JoinKind::Full}) {
    if (to_string(k) == name) return k;
  }
  if (name == "outer") return JoinKind::Full;
  throw Error(ErrorKind::Parse, "unknown join kind '" + std::string(name) + "'");
}

std::string_view to_string(TensorRole r) {
  switch (r) {
    case TensorRole::Main: return "main";
    case TensorRole::LeftSide: return "left";
    case TensorRole::RightSide: return "right";
  }
  return "unknown";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined counter
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

namespace detail {

void check_column(const Schema& s, std::size_t col, std::string_view what) {
  if (col >= s.size()) {
    throw Error(ErrorKind::OutOfRange, std::string(what) + ": column " + std::to_string(col) +
                                           " out of range (" + std::to_string(s.size()) + " attributes)");
  }
}

std::string unique_name(const Schema& taken, std::vector<Attribute>& pending, std::string name) {
  auto used = [&](const std::string& n) {
    if (taken.find(n)) return true;
    return std::any_of(pending.begin(), pending.end(), [&](const Attribute& a) { return a.name == n; });
  };
  while (used(name)) name += "_r";
  return name;
}

namespace {

bool numeric_type(CellType t) { return t == CellType::Integer || t == CellType::Real; }

std::vector<double> numeric_values(const Dataset& d, std::size_t col) {
  std::vector<double> v;
  v.reserve(d.row_count());
  for (const auto& row : d.rows()) {
    if (!row[col].is_null()) v.push_back(row[col].numeric());
  }
  return v;
}

Cell coerce(const Cell& c, CellType type) {
  if (c.is_null()) return c;
  if (type == CellType::Real && c.is_integer()) return Cell::real(static_cast<double>(c.as_integer()));
  if (!cell_matches(c, type)) {
    throw Error(ErrorKind::TypeMismatch, "value '" + c.to_string() + "' is not " + std::string(to_string(type)));
  }
  return c;
}

}  // namespace

Schema transform_schema(const TransformParams& p, const Schema& in) {
  auto attrs = in.attributes();
  if (p.columns.empty()) throw Error(ErrorKind::InvalidArgument, "transform: no columns given");
  CellType map_type = CellType::Text;
  if (p.fn == TransformFn::ValueMap) {
    bool have = false;
    for (const auto& [from, to] : p.mapping) {
      if (to.is_null()) continue;
      CellType t = to.is_integer() ? CellType::Integer
                   : to.is_real()  ? CellType::Real
                   : to.is_text()  ? CellType::Text
                                   : CellType::Boolean;
      if (have && t != map_type) {
        throw Error(ErrorKind::TypeMismatch, "value-map: mapped values must share one type");
      }
      map_type = t;
      have = true;
    }
    if (!have) map_type = CellType::Text;
  }
  for (auto col : p.columns) {
    check_column(in, col, "transform");
    auto& a = attrs[col];
    switch (p.fn) {
      case TransformFn::ImputeMean:
      case TransformFn::ImputeMedian:
      case TransformFn::NormalizeMinMax:
        if (!numeric_type(a.type)) {
          throw Error(ErrorKind::TypeMismatch, std::string(to_string(p.fn)) + ": column '" + a.name + "' is not numeric");
        }
        a.type = CellType::Real;
        break;
      case TransformFn::Binarize:
      case TransformFn::Discretize:
        if (!numeric_type(a.type)) {
          throw Error(ErrorKind::TypeMismatch, std::string(to_string(p.fn)) + ": column '" + a.name + "' is not numeric");
        }
        a.type = CellType::Integer;
        break;
      case TransformFn::ImputeMode:
        break;
      case TransformFn::ImputeConstant:
        if (p.constant.is_null()) throw Error(ErrorKind::InvalidArgument, "impute-constant: constant is null");
        coerce(p.constant, a.type);
        break;
      case TransformFn::ValueMap:
        if (!p.mapping.empty()) a.type = map_type;
        break;
    }
  }
  return Schema(std::move(attrs));
}

TransformState fit_transform(const TransformParams& p, const Schema& in, const Dataset* full) {
  TransformState st;
  const std::size_t k = p.columns.size();
  st.fill.resize(k);
  st.min.resize(k);
  st.max.resize(k);
  st.cuts.resize(k);
  if (p.fn == TransformFn::ValueMap) {
    st.map_type = transform_schema(p, in)[p.columns.at(0)].type;
  }
  if (p.fn == TransformFn::ImputeConstant) {
    for (std::size_t c = 0; c < k; ++c) st.fill[c] = coerce(p.constant, in[p.columns[c]].type);
  }
  if (!is_contextual(p.fn)) return st;
  if (full == nullptr) {
    throw Error(ErrorKind::PolicyViolation,
                std::string(to_string(p.fn)) + " needs its full input dataset to be materialized");
  }
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t col = p.columns[c];
    const std::string& name = in[col].name;
    switch (p.fn) {
      case TransformFn::ImputeMean: {
        auto v = numeric_values(*full, col);
        if (v.empty()) throw Error(ErrorKind::InvalidArgument, "impute-mean: column '" + name + "' has no values");
        double sum = 0.0;
        for (double x : v) sum += x;
        st.fill[c] = Cell::real(sum / static_cast<double>(v.size()));
        break;
      }
      case TransformFn::ImputeMedian: {
        auto v = numeric_values(*full, col);
        if (v.empty()) throw Error(ErrorKind::InvalidArgument, "impute-median: column '" + name + "' has no values");
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        st.fill[c] = Cell::real(n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0);
        break;
      }
      case TransformFn::ImputeMode: {
        std::vector<Cell> values;
        for (const auto& row : full->rows()) {
          if (!row[col].is_null()) values.push_back(row[col]);
        }
        if (values.empty()) throw Error(ErrorKind::InvalidArgument, "impute-mode: column '" + name + "' has no values");
        std::sort(values.begin(), values.end(), cell_less);
        std::size_t best = 0;
        std::size_t best_count = 0;
        for (std::size_t i = 0; i < values.size();) {
          std::size_t j = i;
          while (j < values.size() && values[j] == values[i]) ++j;
          if (j - i > best_count) {
            best = i;
            best_count = j - i;
          }
          i = j;
        }
        st.fill[c] = values[best];
        break;
      }
      case TransformFn::NormalizeMinMax: {
        auto v = numeric_values(*full, col);
        if (!v.empty()) {
          st.min[c] = *std::min_element(v.begin(), v.end());
          st.max[c] = *std::max_element(v.begin(), v.end());
        }
        break;
      }
      case TransformFn::Discretize: {
        if (p.bins == 0) throw Error(ErrorKind::InvalidArgument, "discretize: bins must be positive");
        auto v = numeric_values(*full, col);
        if (v.empty()) throw Error(ErrorKind::InvalidArgument, "discretize: column '" + name + "' has no values");
        std::sort(v.begin(), v.end());
        for (std::size_t j = 1; j < p.bins; ++j) st.cuts[c].push_back(v[j * v.size() / p.bins]);
        break;
      }
      default:
        break;
    }
  }
  return st;
}

Row apply_transform(const TransformParams& p, const TransformState& st, std::span<const Cell> row) {
  Row out(row.begin(), row.end());
  for (std::size_t c = 0; c < p.columns.size(); ++c) {
    Cell& cell = out[p.columns[c]];
    switch (p.fn) {
      case TransformFn::ImputeMean:
      case TransformFn::ImputeMedian:
        cell = cell.is_null() ? st.fill[c] : Cell::real(cell.numeric());
        break;
      case TransformFn::ImputeMode:
      case TransformFn::ImputeConstant:
        if (cell.is_null()) cell = st.fill[c];
        break;
      case TransformFn::Binarize:
        if (!cell.is_null()) cell = Cell::integer(cell.numeric() > p.threshold ? 1 : 0);
        break;
      case TransformFn::NormalizeMinMax:
        if (!cell.is_null()) {
          const double span = st.max[c] - st.min[c];
          cell = Cell::real(span > 0.0 ? (cell.numeric() - st.min[c]) / span : 0.0);
        }
        break;
      case TransformFn::Discretize:
        if (!cell.is_null()) {
          const auto& cuts = st.cuts[c];
          const double x = cell.numeric();
          cell = Cell::integer(static_cast<std::int64_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin()));
        }
        break;
      case TransformFn::ValueMap: {
        if (p.mapping.empty()) break;
        auto it = std::find_if(p.mapping.begin(), p.mapping.end(),
                               [&](const auto& m) { return m.first == cell; });
        if (it != p.mapping.end()) {
          cell = it->second;
        } else if (!cell_matches(cell, st.map_type)) {
          cell = Cell::null();
        }
        break;
      }
    }
  }
  return out;
}

Schema select_schema(const SelectParams& p, const Schema& in) {
  if (p.kept.empty()) throw Error(ErrorKind::InvalidArgument, "vertical reduction must keep at least one column");
  std::vector<Attribute> attrs;
  for (auto k : p.kept) {
    check_column(in, k, "select");
    attrs.push_back(in[k]);
  }
  return Schema(std::move(attrs));
}

Row select_row(const SelectParams& p, std::span<const Cell> row) {
  Row out;
  out.reserve(p.kept.size());
  for (auto k : p.kept) out.push_back(row[k]);
  return out;
}

Schema one_hot_schema(const OneHotParams& p, const Schema& in) {
  auto attrs = in.attributes();
  std::vector<Attribute> added;
  for (const auto& v : p.categories) {
    added.push_back({unique_name(in, added, in[p.column].name + "=" + v.to_string()), CellType::Integer});
  }
  attrs.insert(attrs.end(), added.begin(), added.end());
  return Schema(std::move(attrs));
}

Row one_hot_row(const OneHotParams& p, std::span<const Cell> row) {
  Row out(row.begin(), row.end());
  const Cell& v = row[p.column];
  for (const auto& cat : p.categories) out.push_back(Cell::integer(v == cat ? 1 : 0));
  return out;
}

Schema string_index_schema(const StringIndexParams& p, const Schema& in) {
  auto attrs = in.attributes();
  std::vector<Attribute> added;
  added.push_back({unique_name(in, added, in[p.column].name + "_index"), CellType::Integer});
  attrs.insert(attrs.end(), added.begin(), added.end());
  return Schema(std::move(attrs));
}

Row string_index_row(const StringIndexParams& p, std::span<const Cell> row) {
  Row out(row.begin(), row.end());
  const Cell& v = row[p.column];
  if (v.is_null()) {
    out.push_back(Cell::null());
  } else {
    auto it = std::lower_bound(p.categories.begin(), p.categories.end(), v, cell_less);
    out.push_back(it != p.categories.end() && *it == v
                      ? Cell::integer(static_cast<std::int64_t>(it - p.categories.begin()))
                      : Cell::null());
  }
  return out;
}

namespace {

CellType derive_type(DeriveFn fn, const Schema& in, const std::vector<std::size_t>& sources) {
  if (fn == DeriveFn::Concat) return CellType::Text;
  bool all_int = true;
  for (auto s : sources) {
    if (!numeric_type(in[s].type)) {
      throw Error(ErrorKind::TypeMismatch, "derive " + std::string(to_string(fn)) + ": column '" +
                                               in[s].name + "' is not numeric");
    }
    all_int = all_int && in[s].type == CellType::Integer;
  }
  if (fn == DeriveFn::Mean) return CellType::Real;
  return all_int ? CellType::Integer : CellType::Real;
}

}  // namespace

Schema derive_schema(const DeriveParams& p, const Schema& in) {
  if (p.sources.empty()) throw Error(ErrorKind::InvalidArgument, "derive: no source columns");
  if (p.functions.empty()) throw Error(ErrorKind::InvalidArgument, "derive: no functions");
  if (!p.names.empty() && p.names.size() != p.functions.size()) {
    throw Error(ErrorKind::InvalidArgument, "derive: names and functions differ in length");
  }
  for (auto s : p.sources) check_column(in, s, "derive");
  auto attrs = in.attributes();
  std::vector<Attribute> added;
  for (std::size_t k = 0; k < p.functions.size(); ++k) {
    std::string name = p.names.empty() ? "derived_" + std::to_string(k) : p.names[k];
    if (in.find(name)) throw Error(ErrorKind::InvalidArgument, "derive: column '" + name + "' already exists");
    added.push_back({name, derive_type(p.functions[k], in, p.sources)});
  }
  attrs.insert(attrs.end(), added.begin(), added.end());
  return Schema(std::move(attrs));
}

Row derive_row(const DeriveParams& p, const Schema& in, std::span<const Cell> row) {
  Row out(row.begin(), row.end());
  for (auto fn : p.functions) {
    if (fn == DeriveFn::Concat) {
      std::string s;
      for (std::size_t k = 0; k < p.sources.size(); ++k) {
        if (k) s += "_";
        s += row[p.sources[k]].to_string();
      }
      out.push_back(Cell::text(std::move(s)));
      continue;
    }
    const CellType type = derive_type(fn, in, p.sources);
    bool any_null = false;
    for (auto s : p.sources) any_null = any_null || row[s].is_null();
    if (any_null) {
      out.push_back(Cell::null());
      continue;
    }
    if (type == CellType::Integer) {
      std::int64_t acc = row[p.sources[0]].as_integer();
      for (std::size_t k = 1; k < p.sources.size(); ++k) {
        const std::int64_t x = row[p.sources[k]].as_integer();
        switch (fn) {
          case DeriveFn::Sum: acc += x; break;
          case DeriveFn::Product: acc *= x; break;
          case DeriveFn::Min: acc = std::min(acc, x); break;
          case DeriveFn::Max: acc = std::max(acc, x); break;
          default: break;
        }
      }
      out.push_back(Cell::integer(acc));
    } else {
      double acc = row[p.sources[0]].numeric();
      for (std::size_t k = 1; k < p.sources.size(); ++k) {
        const double x = row[p.sources[k]].numeric();
        switch (fn) {
          case DeriveFn::Sum:
          case DeriveFn::Mean: acc += x; break;
          case DeriveFn::Product: acc *= x; break;
          case DeriveFn::Min: acc = std::min(acc, x); break;
          case DeriveFn::Max: acc = std::max(acc, x); break;
          default: break;
        }
      }
      if (fn == DeriveFn::Mean) acc /= static_cast<double>(p.sources.size());
      out.push_back(Cell::real(acc));
    }
  }
  return out;
}

void check_predicate(const Predicate& p, const Schema& in) {
  for (const auto& c : p.all_of) {
    check_column(in, c.column, "filter");
    if (c.op == CompareOp::IsNull || c.op == CompareOp::NotNull) continue;
    const CellType t = in[c.column].type;
    const bool ok = (numeric_type(t) && c.value.is_numeric()) || (t == CellType::Text && c.value.is_text()) ||
                    (t == CellType::Boolean && c.value.is_boolean());
    if (!ok) {
      throw Error(ErrorKind::TypeMismatch, "filter: cannot compare " + std::string(to_string(t)) +
                                               " column '" + in[c.column].name + "' with '" +
                                               c.value.to_string() + "'");
    }
  }
}

bool evaluate(const Predicate& p, std::span<const Cell> row) {
  for (const auto& c : p.all_of) {
    const Cell& v = row[c.column];
    if (c.op == CompareOp::IsNull) {
      if (!v.is_null()) return false;
      continue;
    }
    if (c.op == CompareOp::NotNull) {
      if (v.is_null()) return false;
      continue;
    }
    if (v.is_null()) return false;
    int cmp;
    if (v.is_numeric()) {
      const double a = v.numeric();
      const double b = c.value.numeric();
      cmp = a < b ? -1 : (a > b ? 1 : 0);
    } else if (v.is_text()) {
      cmp = v.as_text().compare(c.value.as_text());
      cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    } else {
      cmp = static_cast<int>(v.as_boolean()) - static_cast<int>(c.value.as_boolean());
    }
    bool keep = false;
    switch (c.op) {
      case CompareOp::Eq: keep = cmp == 0; break;
      case CompareOp::Ne: keep = cmp != 0; break;
      case CompareOp::Lt: keep = cmp < 0; break;
      case CompareOp::Le: keep = cmp <= 0; break;
      case CompareOp::Gt: keep = cmp > 0; break;
      case CompareOp::Ge: keep = cmp >= 0; break;
      default: break;
    }
    if (!keep) return false;
  }
  return true;
}

bool keep_null_free(const DropNullParams& p, std::span<const Cell> row) {
  if (p.columns.empty()) {
    return std::none_of(row.begin(), row.end(), [](const Cell& c) { return c.is_null(); });
  }
  return std::none_of(p.columns.begin(), p.columns.end(), [&](std::size_t c) { return row[c].is_null(); });
}

bool keep_sampled(const SampleParams& p, RowIndex row) {
  return unit_uniform(mix_seed(p.seed, row, 0)) < p.fraction;
}

Row generate_row(const OversampleParams& p, const Schema& schema, std::span<const Cell> base,
                 std::span<const Cell> other, RowIndex out) {
  Row row(base.begin(), base.end());
  for (std::size_t col = 0; col < schema.size(); ++col) {
    if (col == p.target || schema[col].type != CellType::Real || row[col].is_null()) continue;
    switch (p.strategy) {
      case OversampleStrategy::DuplicateMinority:
        break;
      case OversampleStrategy::NoisyDuplicate: {
        // Box-Muller on two counter-derived uniforms.
        const double u1 = 1.0 - unit_uniform(mix_seed(p.seed, out, 2 * col + 10));
        const double u2 = unit_uniform(mix_seed(p.seed, out, 2 * col + 11));
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        row[col] = Cell::real(row[col].as_real() + p.sigma * z);
        break;
      }
      case OversampleStrategy::Interpolate:
        if (!other.empty() && !other[col].is_null()) {
          const double u = unit_uniform(mix_seed(p.seed, out, 2));
          const double a = row[col].as_real();
          row[col] = Cell::real(a + u * (other[col].as_real() - a));
        }
        break;
    }
  }
  return row;
}

JoinLayout join_layout(const Schema& left, const Schema& right, const JoinParams& p) {
  if (p.keys.empty()) throw Error(ErrorKind::InvalidArgument, "join: no key columns");
  std::vector<std::optional<std::size_t>> right_for_left(left.size());
  std::vector<bool> right_is_key(right.size(), false);
  for (auto [lk, rk] : p.keys) {
    check_column(left, lk, "join (left key)");
    check_column(right, rk, "join (right key)");
    const CellType lt = left[lk].type;
    const CellType rt = right[rk].type;
    if (lt != rt && !(numeric_type(lt) && numeric_type(rt))) {
      throw Error(ErrorKind::TypeMismatch, "join: key '" + left[lk].name + "' (" + std::string(to_string(lt)) +
                                               ") is incompatible with '" + right[rk].name + "' (" +
                                               std::string(to_string(rt)) + ")");
    }
    right_for_left[lk] = rk;
    right_is_key[rk] = true;
  }
  JoinLayout layout;
  std::vector<Attribute> attrs;
  for (std::size_t i = 0; i < left.size(); ++i) {
    Attribute a = left[i];
    if (right_for_left[i] && a.type != right[*right_for_left[i]].type) a.type = CellType::Real;
    attrs.push_back(a);
    layout.columns.push_back({ColumnSource::Left, i, right_for_left[i]});
  }
  std::vector<Attribute> added;
  for (std::size_t j = 0; j < right.size(); ++j) {
    if (right_is_key[j]) continue;
    added.push_back({unique_name(left, added, right[j].name), right[j].type});
    layout.columns.push_back({ColumnSource::Right, j, std::nullopt});
  }
  attrs.insert(attrs.end(), added.begin(), added.end());
  layout.schema = Schema(std::move(attrs));
  return layout;
}

Row join_row(const JoinLayout& layout, std::span<const Cell> left, std::span<const Cell> right) {
  Row out;
  out.reserve(layout.columns.size());
  for (std::size_t k = 0; k < layout.columns.size(); ++k) {
    const auto& src = layout.columns[k];
    Cell c;
    if (src.side == ColumnSource::Left) {
      if (!left.empty()) {
        c = left[src.column];
      } else if (src.coalesce_right && !right.empty()) {
        c = right[*src.coalesce_right];
      }
    } else if (!right.empty()) {
      c = right[src.column];
    }
    out.push_back(coerce(c, layout.schema[k].type));
  }
  return out;
}

std::vector<AttrMapping> join_mappings(const JoinLayout& layout, std::size_t left_attrs,
                                       std::size_t right_attrs) {
  const std::size_t n = layout.columns.size();
  AttrBitset lbits(BitsetSemantics::JoinSide, n);
  AttrBitset rbits(BitsetSemantics::JoinSide, n);
  std::vector<std::size_t> rorder;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& src = layout.columns[k];
    if (src.side == ColumnSource::Left) {
      lbits.set(k);
      if (src.coalesce_right) {
        rbits.set(k);
        rorder.push_back(*src.coalesce_right);
      }
    } else {
      rbits.set(k);
      rorder.push_back(src.column);
    }
  }
  (void)left_attrs;
  (void)right_attrs;
  AttrMapping right = std::is_sorted(rorder.begin(), rorder.end()) ? AttrMapping::plain(std::move(rbits))
                                                                   : AttrMapping{std::move(rbits), std::move(rorder)};
  return {AttrMapping::plain(std::move(lbits)), std::move(right)};
}

AppendLayout append_layout(const Schema& left, const Schema& right) {
  AppendLayout layout;
  layout.left_attrs = left.size();
  std::vector<Attribute> attrs = left.attributes();
  for (std::size_t j = 0; j < right.size(); ++j) {
    if (auto pos = left.find(right[j].name)) {
      if (left[*pos].type != right[j].type) {
        throw Error(ErrorKind::TypeMismatch, "append: attribute '" + right[j].name + "' is " +
                                                 std::string(to_string(left[*pos].type)) + " on the left and " +
                                                 std::string(to_string(right[j].type)) + " on the right");
      }
      layout.right_positions.push_back(*pos);
    } else {
      layout.right_positions.push_back(attrs.size());
      attrs.push_back(right[j]);
    }
  }
  layout.schema = Schema(std::move(attrs));
  return layout;
}

Row append_row(const AppendLayout& layout, TensorRole side, std::span<const Cell> row) {
  Row out(layout.schema.size());
  if (side == TensorRole::LeftSide) {
    std::copy(row.begin(), row.end(), out.begin());
  } else {
    for (std::size_t j = 0; j < row.size(); ++j) out[layout.right_positions[j]] = row[j];
  }
  return out;
}

std::vector<AttrMapping> append_mappings(const AppendLayout& layout, std::size_t right_attrs) {
  const std::size_t n = layout.schema.size();
  AttrBitset lbits(BitsetSemantics::AppendSide, n);
  AttrBitset rbits(BitsetSemantics::AppendSide, n);
  for (std::size_t i = 0; i < layout.left_attrs; ++i) lbits.set(i);
  // order[k]: right attribute behind the k-th set bit, bits ascending.
  std::vector<std::pair<std::size_t, std::size_t>> by_position;
  for (std::size_t j = 0; j < right_attrs; ++j) {
    rbits.set(layout.right_positions[j]);
    by_position.emplace_back(layout.right_positions[j], j);
  }
  std::sort(by_position.begin(), by_position.end());
  std::vector<std::size_t> order;
  for (auto& [pos, j] : by_position) order.push_back(j);
  AttrMapping right = std::is_sorted(order.begin(), order.end()) ? AttrMapping::plain(std::move(rbits))
                                                                 : AttrMapping{std::move(rbits), std::move(order)};
  return {AttrMapping::plain(std::move(lbits)), std::move(right)};
}

}  // namespace detail
}  // namespace tensprov
