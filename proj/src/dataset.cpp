#include "tensprov/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include "tensprov/error.hpp"

namespace tensprov {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::TypeMismatch: return "type_mismatch";
    case ErrorKind::NoPath: return "no_path";
    case ErrorKind::AmbiguousPath: return "ambiguous_path";
    case ErrorKind::PolicyViolation: return "policy_violation";
  }
  return "unknown";
}

std::string_view to_string(CellType type) {
  switch (type) {
    case CellType::Integer: return "integer";
    case CellType::Real: return "real";
    case CellType::Text: return "text";
    case CellType::Boolean: return "boolean";
  }
  return "unknown";
}

CellType parse_cell_type(std::string_view name) {
  if (name == "integer" || name == "int") return CellType::Integer;
  if (name == "real" || name == "float" || name == "double") return CellType::Real;
  if (name == "text" || name == "string") return CellType::Text;
  if (name == "boolean" || name == "bool") return CellType::Boolean;
  throw Error(ErrorKind::Parse, "unknown cell type '" + std::string(name) + "'");
}

double Cell::numeric() const {
  if (is_integer()) return static_cast<double>(as_integer());
  if (is_real()) return as_real();
  throw Error(ErrorKind::TypeMismatch, "cell is not numeric");
}

std::string Cell::to_string() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          auto res = std::to_chars(buf, buf + sizeof(buf), v);
          std::string s(buf, res.ptr);
          // Keep reals distinguishable from integers when read back.
          if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
          return s;
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return v ? "true" : "false";
        }
      },
      value_);
}

bool cell_less(const Cell& a, const Cell& b) {
  if (a.is_null()) return false;
  if (b.is_null()) return true;
  if (a.is_numeric() && b.is_numeric()) {
    if (a.is_integer() && b.is_integer()) return a.as_integer() < b.as_integer();
    return a.numeric() < b.numeric();
  }
  if (a.storage().index() != b.storage().index()) {
    return a.storage().index() < b.storage().index();
  }
  if (a.is_text()) return a.as_text() < b.as_text();
  return a.as_boolean() < b.as_boolean();
}

std::size_t hash_cell(const Cell& c) {
  const std::size_t tag = c.storage().index() * 0x9e3779b97f4a7c15ULL;
  return std::visit(
      [tag](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return tag;
        } else {
          return tag ^ std::hash<T>{}(v);
        }
      },
      c.storage());
}

Schema::Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    for (std::size_t j = i + 1; j < attributes_.size(); ++j) {
      if (attributes_[i].name == attributes_[j].name) {
        throw Error(ErrorKind::InvalidArgument,
                    "duplicate attribute name '" + attributes_[i].name + "'");
      }
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::position_of(std::string_view name) const {
  auto pos = find(name);
  if (!pos) throw Error(ErrorKind::NotFound, "no attribute named '" + std::string(name) + "'");
  return *pos;
}

bool cell_matches(const Cell& c, CellType type) {
  switch (type) {
    case CellType::Integer: return c.is_null() || c.is_integer();
    case CellType::Real: return c.is_null() || c.is_real();
    case CellType::Text: return c.is_null() || c.is_text();
    case CellType::Boolean: return c.is_null() || c.is_boolean();
  }
  return false;
}

Dataset::Dataset(DatasetId id, Schema schema, std::vector<Row> rows)
    : id_(std::move(id)), schema_(std::move(schema)), rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != schema_.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  "dataset '" + id_ + "': row " + std::to_string(i) + " has " +
                      std::to_string(rows_[i].size()) + " cells, schema has " +
                      std::to_string(schema_.size()));
    }
    for (std::size_t a = 0; a < schema_.size(); ++a) {
      if (!cell_matches(rows_[i][a], schema_[a].type)) {
        throw Error(ErrorKind::TypeMismatch,
                    "dataset '" + id_ + "': row " + std::to_string(i) + ", attribute '" +
                        schema_[a].name + "' expects " + std::string(to_string(schema_[a].type)));
      }
    }
  }
}

std::span<const Cell> Dataset::row(std::size_t i) const {
  if (i >= rows_.size()) {
    throw Error(ErrorKind::OutOfRange, "dataset '" + id_ + "': row " + std::to_string(i) +
                                           " out of range (row count " +
                                           std::to_string(rows_.size()) + ")");
  }
  return rows_[i];
}

const Cell& Dataset::cell(std::size_t i, std::size_t attr) const {
  auto r = row(i);
  if (attr >= r.size()) {
    throw Error(ErrorKind::OutOfRange, "dataset '" + id_ + "': attribute " +
                                           std::to_string(attr) + " out of range");
  }
  return r[attr];
}

Dataset Dataset::renamed(DatasetId id) const {
  Dataset copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

std::span<const Cell> get_row(const Dataset& d, std::size_t i) { return d.row(i); }

bool row_equal(const Dataset& d, std::size_t i, std::size_t j) {
  auto a = d.row(i);
  auto b = d.row(j);
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

std::size_t hash_row(std::span<const Cell> row) {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& c : row) {
    h ^= hash_cell(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace tensprov
