#include "tensprov/json_io.hpp"

#include <cmath>

namespace tensprov {

json cell_to_json(const Cell& c) {
  if (c.is_null()) return nullptr;
  if (c.is_integer()) return c.as_integer();
  if (c.is_real()) return c.as_real();
  if (c.is_text()) return c.as_text();
  return c.as_boolean();
}

Cell cell_from_json(const json& j) {
  if (j.is_null()) return Cell::null();
  if (j.is_boolean()) return Cell::boolean(j.get<bool>());
  if (j.is_number_integer()) return Cell::integer(j.get<std::int64_t>());
  if (j.is_number()) return Cell::real(j.get<double>());
  if (j.is_string()) return Cell::text(j.get<std::string>());
  throw Error(ErrorKind::Parse, "expected a scalar value, got " + j.dump());
}

json schema_to_json(const Schema& s) {
  json out = json::array();
  for (const auto& a : s.attributes()) out.push_back({{"name", a.name}, {"type", std::string(to_string(a.type))}});
  return out;
}

json rows_to_json(const RecordBatch& batch) {
  json rows = json::array();
  for (std::size_t k = 0; k < batch.indices.size(); ++k) {
    json cells = json::array();
    for (const auto& c : batch.rows[k]) cells.push_back(cell_to_json(c));
    rows.push_back({{"row", batch.indices[k]}, {"values", std::move(cells)}});
  }
  json attrs = json::array();
  for (const auto& a : batch.schema.attributes()) attrs.push_back(a.name);
  return {{"dataset", batch.dataset}, {"attributes", std::move(attrs)}, {"rows", std::move(rows)}};
}

json tensor_to_json(const ProvTensor& t) {
  json dims = json::array();
  for (const auto& d : t.dims()) {
    dims.push_back({{"dataset", d.dataset},
                    {"polarity", d.polarity == Polarity::Output ? "output" : "input"},
                    {"extent", d.extent}});
  }
  json leaves = json::array();
  const LeafSet l = t.leaves();
  for (std::size_t k = 0; k < l.size(); ++k) {
    const auto tuple = l.tuple(k);
    leaves.push_back(json(std::vector<RowIndex>(tuple.begin(), tuple.end())));
  }
  return {{"dims", std::move(dims)}, {"leaves", std::move(leaves)}};
}

ProvTensor tensor_from_json(const json& j) {
  try {
    std::vector<DimensionRole> dims;
    for (const auto& d : j.at("dims")) {
      const std::string pol = d.at("polarity").get<std::string>();
      if (pol != "input" && pol != "output") throw Error(ErrorKind::Parse, "bad polarity '" + pol + "'");
      dims.push_back({d.at("dataset").get<std::string>(), pol == "output" ? Polarity::Output : Polarity::Input,
                      d.at("extent").get<std::size_t>()});
    }
    std::vector<RowIndex> entries;
    for (const auto& leaf : j.at("leaves")) {
      if (leaf.size() != dims.size()) throw Error(ErrorKind::Parse, "leaf arity does not match the dimensions");
      for (const auto& v : leaf) entries.push_back(v.get<RowIndex>());
    }
    return ProvTensor::from_leaves(std::move(dims), std::move(entries));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("tensor document: ") + e.what());
  }
}

json descriptor_to_json(const OpDescriptor& op) {
  json bitsets = json::array();
  for (const auto& m : op.bitsets) {
    json b = {{"semantics", std::string(to_string(m.bits.semantics()))}, {"bits", m.bits.to_string()}};
    if (m.bits.input_attr_count()) b["m"] = *m.bits.input_attr_count();
    if (m.order) b["kept_order"] = *m.order;
    bitsets.push_back(std::move(b));
  }
  return {{"id", op.id},
          {"name", op.name},
          {"category", std::string(to_string(op.category))},
          {"contextual", op.contextual},
          {"inputs", op.inputs},
          {"output", op.output},
          {"bitsets", std::move(bitsets)}};
}

json memory_to_json(const MemoryReport& m) {
  json ops = json::array();
  for (const auto& o : m.ops) ops.push_back({{"op", o.op_id}, {"nnz", o.nnz}, {"tensor_bytes", o.tensor_bytes}});
  json data = json::array();
  for (const auto& d : m.materialized) data.push_back({{"dataset", d.id}, {"rows", d.rows}, {"bytes", d.bytes}});
  return {{"ops", std::move(ops)},
          {"materialized", std::move(data)},
          {"tensor_bytes", m.tensor_bytes},
          {"dataset_bytes", m.dataset_bytes},
          {"total_bytes", m.total_bytes},
          {"accounting",
           "tensor: 64 B + 32 B/dim + 4 B/tuple entry + 4 B/leaf ref + 8 B/index key (identity: fixed part only); "
           "dataset: 16 B/cell + text bytes"}};
}

double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

json hit_to_json(const Hit& h) {
  json j = {{"dataset", h.dataset}, {"row", h.row}};
  if (h.attr) j["attr"] = *h.attr;
  return j;
}

namespace {

json hits_to_json(const std::vector<Hit>& hits) {
  json out = json::array();
  for (const auto& h : hits) out.push_back(hit_to_json(h));
  return out;
}

}  // namespace

json query_to_json(const QueryResult& r) {
  json how = json::array();
  for (const auto& s : r.how) {
    how.push_back({{"op", s.op_id},
                   {"name", s.op_name},
                   {"category", std::string(to_string(s.category))},
                   {"inputs", hits_to_json(s.inputs)},
                   {"outputs", hits_to_json(s.outputs)}});
  }
  json out = {{"query", std::string(to_string(r.type))}, {"hits", hits_to_json(r.hits)}, {"how", std::move(how)}};
  if (r.type == QueryType::Q9) {
    json ops = json::array();
    for (const auto* op : r.ops) ops.push_back(descriptor_to_json(*op));
    out["ops"] = std::move(ops);
  }
  if (!r.resolved.empty()) {
    json values = json::array();
    for (const auto& b : r.resolved) values.push_back(rows_to_json(b));
    out["records"] = std::move(values);
  }
  out["timing_ms"] = round_ms(r.timing_ms);
  return out;
}

json error_to_json(ErrorKind kind, const std::string& message) {
  return {{"error", {{"kind", std::string(to_string(kind))}, {"message", message}}}};
}

}  // namespace tensprov
