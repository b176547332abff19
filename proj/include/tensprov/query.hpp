#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tensprov/pipeline.hpp"

namespace tensprov {

struct RecordRef {
  DatasetId dataset;
  RowIndex row = 0;

  friend bool operator==(const RecordRef&, const RecordRef&) = default;
};

struct CellRef {
  RecordRef record;
  std::size_t attr = 0;

  friend bool operator==(const CellRef&, const CellRef&) = default;
};

// A query hit; `attr` is set for attribute-level queries.
struct Hit {
  DatasetId dataset;
  RowIndex row = 0;
  std::optional<std::size_t> attr;

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct HowStep {
  std::string op_id;
  std::string op_name;
  OpCategory category = OpCategory::DataTransformation;
  std::vector<Hit> inputs;
  std::vector<Hit> outputs;
};

enum class Direction { Forward, Backward };

struct QueryOptions {
  // Consult canonical tensors and report duplicate-class minima.
  bool set_semantics = false;
};

// Q1 / Q2
std::vector<RecordRef> q_forward_records(const Pipeline& p, const RecordRef& src, const DatasetId& dst,
                                         const QueryOptions& opts = {});
std::vector<RecordRef> q_backward_records(const Pipeline& p, const RecordRef& dst_rec, const DatasetId& src,
                                          const QueryOptions& opts = {});
// Q3 / Q4
std::vector<CellRef> q_forward_attr(const Pipeline& p, const CellRef& src, const DatasetId& dst,
                                    const QueryOptions& opts = {});
std::vector<CellRef> q_backward_attr(const Pipeline& p, const CellRef& dst_cell, const DatasetId& src,
                                     const QueryOptions& opts = {});
// Q5 / Q6: forward steps run in execution order, backward steps in reverse.
std::vector<HowStep> q_how_records(const Pipeline& p, const RecordRef& rec, const DatasetId& other,
                                   Direction direction, const QueryOptions& opts = {});
// Q7 / Q8
std::vector<HowStep> q_how_attr(const Pipeline& p, const CellRef& cell, const DatasetId& other,
                                Direction direction, const QueryOptions& opts = {});
// Q9: every operation upstream of `d`, in execution order.
std::vector<const OpDescriptor*> q_all_transformations(const Pipeline& p, const DatasetId& d);
// Q10: records of d2 combined with d1_rec by the nearest join both reach.
std::vector<RecordRef> q_co_contributory(const Pipeline& p, const RecordRef& d1_rec, const DatasetId& d2,
                                         const QueryOptions& opts = {});
// Q11: records of d3 sharing d1 ancestors with d2_rec.
std::vector<RecordRef> q_co_dependency(const Pipeline& p, const RecordRef& d2_rec, const DatasetId& d1,
                                       const DatasetId& d3, const QueryOptions& opts = {});

// Order-2 tensor (dst, src) relating the two datasets across the whole path.
ProvTensor whole_dataset_mapping(const Pipeline& p, const DatasetId& src, const DatasetId& dst);

// ---- generic front end used by the CLI --------------------------------------

enum class QueryType { Q1, Q2, Q3, Q4, Q5, Q6, Q7, Q8, Q9, Q10, Q11 };
std::string_view to_string(QueryType q);
QueryType parse_query_type(std::string_view name);

struct QueryRequest {
  QueryType type = QueryType::Q1;
  DatasetId dataset;                 // the record's (or Q9's) dataset
  std::optional<RowIndex> row;
  std::optional<std::size_t> attr;
  DatasetId other;                   // target / source / d2 / d1
  DatasetId third;                   // Q11 d3
  QueryOptions options;
  bool resolve = false;              // attach recomputed row values
};

struct QueryResult {
  QueryType type = QueryType::Q1;
  std::vector<Hit> hits;
  std::vector<HowStep> how;
  std::vector<const OpDescriptor*> ops;  // Q9
  std::vector<RecordBatch> resolved;
  double timing_ms = 0.0;
};

QueryResult run_query(const Pipeline& p, const QueryRequest& request);

}  // namespace tensprov
