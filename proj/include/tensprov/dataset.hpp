#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tensprov {

using RowIndex = std::uint32_t;
using DatasetId = std::string;

enum class CellType { Integer, Real, Text, Boolean };

std::string_view to_string(CellType type);
CellType parse_cell_type(std::string_view name);

// A single typed value. Null is its own alternative, and null == null holds so
// that duplicate detection under set semantics treats missing values alike.
class Cell {
 public:
  using Storage = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

  Cell() = default;
  static Cell null() { return Cell{}; }
  static Cell integer(std::int64_t v) { return Cell{Storage{v}}; }
  static Cell real(double v) { return Cell{Storage{v}}; }
  static Cell text(std::string v) { return Cell{Storage{std::move(v)}}; }
  static Cell boolean(bool v) { return Cell{Storage{v}}; }

  bool is_null() const { return std::holds_alternative<std::monostate>(value_); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_real() const { return std::holds_alternative<double>(value_); }
  bool is_text() const { return std::holds_alternative<std::string>(value_); }
  bool is_boolean() const { return std::holds_alternative<bool>(value_); }
  bool is_numeric() const { return is_integer() || is_real(); }

  std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
  double as_real() const { return std::get<double>(value_); }
  const std::string& as_text() const { return std::get<std::string>(value_); }
  bool as_boolean() const { return std::get<bool>(value_); }

  // Integer or real widened to double. Throws on other alternatives.
  double numeric() const;

  // Text rendering used by CSV output and debug printing; null renders empty.
  std::string to_string() const;

  const Storage& storage() const { return value_; }

  friend bool operator==(const Cell&, const Cell&) = default;

 private:
  explicit Cell(Storage v) : value_(std::move(v)) {}
  Storage value_;
};

// Total order used for sorting: values of one type compare naturally, nulls last.
bool cell_less(const Cell& a, const Cell& b);

std::size_t hash_cell(const Cell& c);

using Row = std::vector<Cell>;

struct Attribute {
  std::string name;
  CellType type;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Attribute> attributes);

  std::size_t size() const { return attributes_.size(); }
  const Attribute& operator[](std::size_t pos) const { return attributes_.at(pos); }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::optional<std::size_t> find(std::string_view name) const;
  // Like find() but throws NotFound.
  std::size_t position_of(std::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Attribute> attributes_;
};

// Immutable table. Row i is the record at index i; indices are dense and fixed
// at construction.
class Dataset {
 public:
  Dataset() = default;
  // Validates that every row has exactly one cell per attribute and that each
  // non-null cell matches its column type.
  Dataset(DatasetId id, Schema schema, std::vector<Row> rows);

  const DatasetId& id() const { return id_; }
  const Schema& schema() const { return schema_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t attr_count() const { return schema_.size(); }

  std::span<const Cell> row(std::size_t i) const;
  const Cell& cell(std::size_t i, std::size_t attr) const;
  const std::vector<Row>& rows() const { return rows_; }

  // Same content under a different identifier.
  Dataset renamed(DatasetId id) const;

 private:
  DatasetId id_;
  Schema schema_;
  std::vector<Row> rows_;
};

std::span<const Cell> get_row(const Dataset& d, std::size_t i);
bool row_equal(const Dataset& d, std::size_t i, std::size_t j);
std::size_t hash_row(std::span<const Cell> row);

// Checks that the cell is null or of the given type.
bool cell_matches(const Cell& c, CellType type);

}  // namespace tensprov
