#pragma once

#include "json.hpp"

#include "tensprov/error.hpp"
#include "tensprov/pipeline.hpp"
#include "tensprov/query.hpp"

namespace tensprov {

using json = nlohmann::ordered_json;

json cell_to_json(const Cell& c);
Cell cell_from_json(const json& j);

json schema_to_json(const Schema& s);
json rows_to_json(const RecordBatch& batch);

// Debug form {dims: [{dataset, polarity, extent}], leaves: [[...], ...]}.
json tensor_to_json(const ProvTensor& t);
ProvTensor tensor_from_json(const json& j);

json descriptor_to_json(const OpDescriptor& op);
json memory_to_json(const MemoryReport& m);
json hit_to_json(const Hit& h);
json query_to_json(const QueryResult& r);

// Milliseconds rounded to microsecond resolution.
double round_ms(double ms);

json error_to_json(ErrorKind kind, const std::string& message);

}  // namespace tensprov
