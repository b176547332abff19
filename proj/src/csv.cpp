#include "tensprov/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tensprov/error.hpp"

namespace tensprov {

namespace {

struct RawRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

std::vector<RawRecord> split_records(std::string_view text) {
  std::vector<RawRecord> records;
  RawRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A record made of a single empty field is a blank line.
    if (!(current.fields.size() == 1 && current.fields[0].empty())) {
      records.push_back(std::move(current));
    }
    current = RawRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty()) {
          throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": stray quote");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(current.line) + ": unterminated quote");
  }
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

bool parses_integer(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parses_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parses_boolean(std::string_view s, bool& out) {
  if (s == "true" || s == "True" || s == "TRUE" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "False" || s == "FALSE" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

CellType infer_type(const std::vector<RawRecord>& records, std::size_t first, std::size_t col) {
  bool all_int = true;
  bool all_real = true;
  for (std::size_t r = first; r < records.size(); ++r) {
    const std::string& f = records[r].fields[col];
    if (f.empty()) continue;
    std::int64_t iv;
    double dv;
    if (all_int && !parses_integer(f, iv)) all_int = false;
    if (!all_int && !parses_real(f, dv)) {
      all_real = false;
      break;
    }
  }
  if (all_int) return CellType::Integer;
  if (all_real) return CellType::Real;
  return CellType::Text;
}

Cell convert(const std::string& field, CellType type, std::size_t line, const std::string& column) {
  if (field.empty()) return Cell::null();
  switch (type) {
    case CellType::Integer: {
      std::int64_t v;
      if (parses_integer(field, v)) return Cell::integer(v);
      break;
    }
    case CellType::Real: {
      double v;
      if (parses_real(field, v)) return Cell::real(v);
      break;
    }
    case CellType::Boolean: {
      bool v;
      if (parses_boolean(field, v)) return Cell::boolean(v);
      break;
    }
    case CellType::Text:
      return Cell::text(field);
  }
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": value '" + field +
                                    "' is not " + std::string(to_string(type)) +
                                    " (column '" + column + "')");
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Dataset parse_csv(std::string_view text, DatasetId id, const CsvOptions& options) {
  auto records = split_records(text);
  std::vector<std::string> names;
  std::size_t first = 0;
  if (options.has_header) {
    if (records.empty()) {
      throw Error(ErrorKind::Parse, "dataset '" + id + "': missing header line");
    }
    names = records[0].fields;
    first = 1;
  } else if (!records.empty()) {
    for (std::size_t c = 0; c < records[0].fields.size(); ++c) names.push_back("c" + std::to_string(c));
  }
  for (std::size_t r = first; r < records.size(); ++r) {
    if (records[r].fields.size() != names.size()) {
      throw Error(ErrorKind::Parse, "dataset '" + id + "': line " + std::to_string(records[r].line) +
                                        " has " + std::to_string(records[r].fields.size()) +
                                        " fields, expected " + std::to_string(names.size()));
    }
  }

  std::vector<Attribute> attrs;
  for (std::size_t c = 0; c < names.size(); ++c) {
    auto hint = options.type_hints.find(names[c]);
    CellType type = hint != options.type_hints.end() ? hint->second : infer_type(records, first, c);
    attrs.push_back({names[c], type});
  }

  std::vector<Row> rows;
  rows.reserve(records.size() - first);
  for (std::size_t r = first; r < records.size(); ++r) {
    Row row;
    row.reserve(attrs.size());
    for (std::size_t c = 0; c < attrs.size(); ++c) {
      row.push_back(convert(records[r].fields[c], attrs[c].type, records[r].line, attrs[c].name));
    }
    rows.push_back(std::move(row));
  }
  return Dataset(std::move(id), Schema(std::move(attrs)), std::move(rows));
}

Dataset load_csv(const std::filesystem::path& path, DatasetId id, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read failure on '" + path.string() + "'");
  return parse_csv(buf.str(), std::move(id), options);
}

std::string write_csv(const Dataset& d) {
  std::string out;
  const auto& attrs = d.schema().attributes();
  for (std::size_t c = 0; c < attrs.size(); ++c) {
    if (c) out.push_back(',');
    out += quote_if_needed(attrs[c].name);
  }
  out.push_back('\n');
  for (const auto& row : d.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      out += quote_if_needed(row[c].to_string());
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace tensprov
