#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tensprov/dataset.hpp"

namespace tensprov {

struct CsvOptions {
  bool has_header = true;
  // Column name (or "c<k>" for headerless input) -> forced type.
  std::map<std::string, CellType> type_hints;
};

// RFC-4180 reader. Untyped columns are inferred integer, then real, then text.
// Empty fields become null. A ragged row raises Parse with its line number.
Dataset load_csv(const std::filesystem::path& path, DatasetId id, const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, DatasetId id, const CsvOptions& options = {});

// Header line plus one line per row; null cells are empty fields.
std::string write_csv(const Dataset& d);

}  // namespace tensprov
