#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tensprov/dataset.hpp"
#include "tensprov/ops.hpp"
#include "tensprov/prov_tensor.hpp"

namespace tensprov {

struct OpRecord {
  OpDescriptor descriptor;
  std::vector<CapturedTensor> tensors;
  // Output dimension rewritten to duplicate-class minima; filled when set
  // semantics is enabled or first requested.
  mutable std::vector<CapturedTensor> canonical;
  CaptureStats stats;
  double capture_ms = 0.0;
};

struct PipelineOptions {
  // Shadow mode: keep every intermediate dataset.
  bool materialize_all = false;
  // Compute duplicate classes and canonical tensors while data is at hand.
  bool set_semantics = false;
};

// One tensor that relates a hop's input dataset to its output.
struct TensorBinding {
  std::size_t tensor = 0;  // index into OpRecord::tensors
  std::size_t in_dim = 1;
  std::size_t side = 0;    // which descriptor input (selects the bitset)
};

struct PathHop {
  const OpRecord* op = nullptr;
  DatasetId input;
  DatasetId output;
  std::vector<TensorBinding> bindings;
};

// Recomputed rows of one dataset, in request order.
struct RecordBatch {
  DatasetId dataset;
  Schema schema;
  std::vector<RowIndex> indices;
  std::vector<Row> rows;
};

struct MemoryReport {
  struct OpEntry {
    std::string op_id;
    std::size_t nnz = 0;
    std::size_t tensor_bytes = 0;
  };
  struct DatasetEntry {
    DatasetId id;
    std::size_t rows = 0;
    std::size_t bytes = 0;
  };
  std::vector<OpEntry> ops;
  std::vector<DatasetEntry> materialized;
  std::size_t tensor_bytes = 0;
  std::size_t dataset_bytes = 0;
  std::size_t total_bytes = 0;
};

// Accounting for a retained dataset: 16 bytes per cell plus text payload.
std::size_t dataset_bytes(const Dataset& d);

// Operations linked through the datasets they read and write. Sources, sinks
// and inputs of contextual operations stay materialized; other intermediates
// are released once consumed and recomputed from provenance on demand.
class Pipeline {
 public:
  explicit Pipeline(PipelineOptions options = {});
  Pipeline(Pipeline&&) = delete;

  const PipelineOptions& options() const { return options_; }

  void add_source(Dataset d);
  // Executes the operation on the registered inputs and registers the result.
  const OpRecord& run(const OpTarget& target, const OpParams& params, const std::vector<DatasetId>& inputs);
  const OpRecord& register_capture(CaptureResult result, double capture_ms = 0.0);

  bool contains(const DatasetId& id) const { return datasets_.count(id) > 0; }
  bool is_source(const DatasetId& id) const;
  bool is_materialized(const DatasetId& id) const;
  const Schema& schema(const DatasetId& id) const;
  std::size_t row_count(const DatasetId& id) const;
  // Registration order.
  const std::vector<DatasetId>& dataset_ids() const { return order_; }
  std::vector<DatasetId> materialized_ids() const;

  // Retained value, or a full recomputation for released intermediates.
  std::shared_ptr<const Dataset> dataset(const DatasetId& id) const;

  const std::vector<std::unique_ptr<OpRecord>>& ops() const { return ops_; }
  const OpRecord& op(const std::string& op_id) const;
  const OpRecord* producer(const DatasetId& id) const;
  std::vector<const OpRecord*> consumers(const DatasetId& id) const;

  bool reaches(const DatasetId& src, const DatasetId& dst) const;
  // Hops of the unique dataflow path from src to dst.
  std::vector<PathHop> dataflow_path(const DatasetId& src, const DatasetId& dst) const;

  RecordBatch recompute_records(const DatasetId& id, std::span<const RowIndex> rows) const;

  MemoryReport memory_report() const;

  const DuplicateClasses& duplicate_classes(const DatasetId& id) const;
  std::span<const CapturedTensor> tensors(const OpRecord& op, bool set_semantics) const;

 private:
  struct Entry {
    Schema schema;
    std::size_t rows = 0;
    bool source = false;
    bool pinned = false;  // input of a contextual operation
    const OpRecord* producer = nullptr;
    std::vector<const OpRecord*> consumers;
    std::shared_ptr<const Dataset> data;
  };

  const Entry& entry(const DatasetId& id) const;
  void release_if_intermediate(const DatasetId& id);
  void ensure_classes(const DatasetId& id, const Dataset* data) const;
  void ensure_canonical(const OpRecord& op) const;

  PipelineOptions options_;
  std::map<DatasetId, Entry> datasets_;
  std::vector<DatasetId> order_;
  std::vector<std::unique_ptr<OpRecord>> ops_;
  std::map<std::string, OpRecord*> op_index_;

  mutable std::mutex lazy_mutex_;
  mutable std::map<DatasetId, DuplicateClasses> classes_;
};

}  // namespace tensprov
