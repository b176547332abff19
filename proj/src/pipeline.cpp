#include "tensprov/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <unordered_map>

#include "tensprov/error.hpp"

namespace tensprov {

std::size_t dataset_bytes(const Dataset& d) {
  std::size_t bytes = 16 * d.row_count() * d.attr_count();
  for (const auto& row : d.rows()) {
    for (const auto& c : row) {
      if (c.is_text()) bytes += c.as_text().size();
    }
  }
  return bytes;
}

Pipeline::Pipeline(PipelineOptions options) : options_(options) {}

const Pipeline::Entry& Pipeline::entry(const DatasetId& id) const {
  auto it = datasets_.find(id);
  if (it == datasets_.end()) throw Error(ErrorKind::NotFound, "unknown dataset '" + id + "'");
  return it->second;
}

void Pipeline::add_source(Dataset d) {
  if (contains(d.id())) throw Error(ErrorKind::InvalidArgument, "dataset '" + d.id() + "' already registered");
  Entry e;
  e.schema = d.schema();
  e.rows = d.row_count();
  e.source = true;
  const DatasetId id = d.id();
  e.data = std::make_shared<const Dataset>(std::move(d));
  if (options_.set_semantics) classes_.emplace(id, tensprov::duplicate_classes(*e.data));
  datasets_.emplace(id, std::move(e));
  order_.push_back(id);
}

const OpRecord& Pipeline::run(const OpTarget& target, const OpParams& params,
                              const std::vector<DatasetId>& inputs) {
  std::vector<std::shared_ptr<const Dataset>> held;
  std::vector<const Dataset*> ptrs;
  for (const auto& id : inputs) {
    held.push_back(dataset(id));
    ptrs.push_back(held.back().get());
  }
  const auto start = std::chrono::steady_clock::now();
  CaptureResult r = execute(target, params, ptrs);
  const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
  return register_capture(std::move(r), took.count());
}

const OpRecord& Pipeline::register_capture(CaptureResult result, double capture_ms) {
  const OpDescriptor& desc = result.descriptor;
  if (op_index_.count(desc.id)) throw Error(ErrorKind::InvalidArgument, "duplicate operation id '" + desc.id + "'");
  for (const auto& in : desc.inputs) {
    if (!contains(in)) {
      throw Error(ErrorKind::NotFound, "operation '" + desc.id + "' reads unknown dataset '" + in + "'");
    }
  }
  if (contains(desc.output)) {
    throw Error(ErrorKind::InvalidArgument, "dataset '" + desc.output + "' is already produced");
  }
  if (result.output.id() != desc.output) {
    throw Error(ErrorKind::InvalidArgument, "operation '" + desc.id + "' output id does not match its descriptor");
  }
  for (const auto& t : result.tensors) {
    if (t.tensor.dim(0).dataset != desc.output || t.tensor.dim(0).extent != result.output.row_count()) {
      throw Error(ErrorKind::InvalidArgument, "operation '" + desc.id + "': tensor output dimension mismatch");
    }
    for (std::size_t d = 1; d < t.tensor.order(); ++d) {
      const auto& role = t.tensor.dim(d);
      if (std::find(desc.inputs.begin(), desc.inputs.end(), role.dataset) == desc.inputs.end() ||
          role.extent != row_count(role.dataset)) {
        throw Error(ErrorKind::InvalidArgument, "operation '" + desc.id + "': tensor input dimension mismatch");
      }
    }
  }

  auto rec = std::make_unique<OpRecord>();
  rec->descriptor = std::move(result.descriptor);
  rec->tensors = std::move(result.tensors);
  rec->stats = result.stats;
  rec->capture_ms = capture_ms;
  OpRecord* op = rec.get();

  // Contextual inputs are pinned; a released one is brought back first.
  if (op->descriptor.contextual) {
    for (const auto& in : op->descriptor.inputs) {
      auto& e = datasets_.at(in);
      if (!e.data) e.data = dataset(in);
      e.pinned = true;
    }
  }

  Entry out;
  out.schema = result.output.schema();
  out.rows = result.output.row_count();
  out.producer = op;
  out.data = std::make_shared<const Dataset>(std::move(result.output));
  if (options_.set_semantics) classes_.emplace(op->descriptor.output, tensprov::duplicate_classes(*out.data));
  datasets_.emplace(op->descriptor.output, std::move(out));
  order_.push_back(op->descriptor.output);

  for (const auto& in : op->descriptor.inputs) {
    auto& cons = datasets_.at(in).consumers;
    if (std::find(cons.begin(), cons.end(), op) == cons.end()) cons.push_back(op);
  }
  op_index_.emplace(op->descriptor.id, op);
  ops_.push_back(std::move(rec));

  if (options_.set_semantics) {
    std::lock_guard lock(lazy_mutex_);
    ensure_canonical(*op);
  }
  for (const auto& in : op->descriptor.inputs) release_if_intermediate(in);
  return *op;
}

void Pipeline::release_if_intermediate(const DatasetId& id) {
  auto& e = datasets_.at(id);
  if (options_.materialize_all || e.source || e.pinned || e.consumers.empty()) return;
  e.data.reset();
}

bool Pipeline::is_source(const DatasetId& id) const { return entry(id).source; }
bool Pipeline::is_materialized(const DatasetId& id) const { return entry(id).data != nullptr; }
const Schema& Pipeline::schema(const DatasetId& id) const { return entry(id).schema; }
std::size_t Pipeline::row_count(const DatasetId& id) const { return entry(id).rows; }

std::vector<DatasetId> Pipeline::materialized_ids() const {
  std::vector<DatasetId> ids;
  for (const auto& id : order_) {
    if (datasets_.at(id).data) ids.push_back(id);
  }
  return ids;
}

std::shared_ptr<const Dataset> Pipeline::dataset(const DatasetId& id) const {
  const Entry& e = entry(id);
  if (e.data) return e.data;
  std::vector<RowIndex> all(e.rows);
  for (std::size_t i = 0; i < e.rows; ++i) all[i] = static_cast<RowIndex>(i);
  RecordBatch batch = recompute_records(id, all);
  return std::make_shared<const Dataset>(id, std::move(batch.schema), std::move(batch.rows));
}

const OpRecord& Pipeline::op(const std::string& op_id) const {
  auto it = op_index_.find(op_id);
  if (it == op_index_.end()) throw Error(ErrorKind::NotFound, "unknown operation '" + op_id + "'");
  return *it->second;
}

const OpRecord* Pipeline::producer(const DatasetId& id) const { return entry(id).producer; }

std::vector<const OpRecord*> Pipeline::consumers(const DatasetId& id) const { return entry(id).consumers; }

bool Pipeline::reaches(const DatasetId& src, const DatasetId& dst) const {
  entry(src);
  entry(dst);
  if (src == dst) return true;
  std::vector<DatasetId> stack{src};
  std::map<DatasetId, bool> seen;
  while (!stack.empty()) {
    DatasetId cur = stack.back();
    stack.pop_back();
    for (const OpRecord* op : entry(cur).consumers) {
      const DatasetId& next = op->descriptor.output;
      if (next == dst) return true;
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return false;
}

std::vector<PathHop> Pipeline::dataflow_path(const DatasetId& src, const DatasetId& dst) const {
  entry(src);
  entry(dst);
  if (src == dst) throw Error(ErrorKind::InvalidArgument, "dataflow path needs two distinct datasets");

  // Count paths per dataset toward dst (memoized), then walk the unique one.
  std::map<DatasetId, std::size_t> paths;
  std::function<std::size_t(const DatasetId&)> count = [&](const DatasetId& d) -> std::size_t {
    if (d == dst) return 1;
    if (auto it = paths.find(d); it != paths.end()) return it->second;
    std::size_t n = 0;
    for (const OpRecord* op : entry(d).consumers) n += count(op->descriptor.output);
    paths[d] = n;
    return n;
  };
  const std::size_t total = count(src);
  if (total == 0) throw Error(ErrorKind::NoPath, "no dataflow path from '" + src + "' to '" + dst + "'");
  if (total > 1) {
    throw Error(ErrorKind::AmbiguousPath, "several dataflow paths lead from '" + src + "' to '" + dst +
                                              "'; lineage over diamond dataflows is not supported");
  }

  std::vector<PathHop> hops;
  DatasetId cur = src;
  while (cur != dst) {
    for (const OpRecord* op : entry(cur).consumers) {
      if (count(op->descriptor.output) == 0) continue;
      PathHop hop{op, cur, op->descriptor.output, {}};
      const auto& d = op->descriptor;
      for (std::size_t side = 0; side < d.inputs.size(); ++side) {
        if (d.inputs[side] != cur) continue;
        for (std::size_t t = 0; t < op->tensors.size(); ++t) {
          const auto& ct = op->tensors[t];
          switch (ct.role) {
            case TensorRole::Main:
              if (d.category == OpCategory::Join) {
                hop.bindings.push_back({t, 1 + side, side});
              } else {
                hop.bindings.push_back({t, 1, side});
              }
              break;
            case TensorRole::LeftSide:
              if (side == 0) hop.bindings.push_back({t, 1, side});
              break;
            case TensorRole::RightSide:
              if (side == 1) hop.bindings.push_back({t, 1, side});
              break;
          }
        }
      }
      hops.push_back(std::move(hop));
      cur = op->descriptor.output;
      break;
    }
  }
  return hops;
}

RecordBatch Pipeline::recompute_records(const DatasetId& id, std::span<const RowIndex> rows) const {
  const Entry& e = entry(id);
  for (RowIndex r : rows) {
    if (r >= e.rows) {
      throw Error(ErrorKind::OutOfRange, "row " + std::to_string(r) + " out of range for dataset '" + id + "' (" +
                                             std::to_string(e.rows) + " rows)");
    }
  }
  RecordBatch batch{id, e.schema, {rows.begin(), rows.end()}, {}};
  if (rows.empty()) return batch;
  if (e.data) {
    for (RowIndex r : rows) {
      const auto row = e.data->row(r);
      batch.rows.emplace_back(row.begin(), row.end());
    }
    return batch;
  }
  const OpRecord& op = *e.producer;
  const auto& desc = op.descriptor;
  const RowSet wanted = make_row_set({rows.begin(), rows.end()});
  const auto need = replay_requirements(desc, op.tensors, wanted);

  std::vector<std::shared_ptr<const Dataset>> held;
  std::vector<InputRows> inputs;
  for (std::size_t k = 0; k < desc.inputs.size(); ++k) {
    const DatasetId& in = desc.inputs[k];
    const Entry& ie = entry(in);
    InputRows ir;
    ir.schema = ie.schema;
    if (ie.data) {
      held.push_back(ie.data);
      ir.full = ie.data.get();
    } else if (desc.contextual) {
      throw Error(ErrorKind::PolicyViolation, "contextual operation '" + desc.id + "' lost its input '" + in + "'");
    } else {
      RecordBatch sub = recompute_records(in, need[k]);
      for (std::size_t j = 0; j < sub.indices.size(); ++j) ir.rows.emplace(sub.indices[j], std::move(sub.rows[j]));
    }
    inputs.push_back(std::move(ir));
  }
  auto produced = replay(desc, op.tensors, inputs, wanted);
  std::unordered_map<RowIndex, std::size_t> at;
  for (std::size_t j = 0; j < wanted.size(); ++j) at.emplace(wanted[j], j);
  batch.rows.reserve(rows.size());
  for (RowIndex r : rows) batch.rows.push_back(produced[at.at(r)]);
  return batch;
}

MemoryReport Pipeline::memory_report() const {
  MemoryReport m;
  for (const auto& op : ops_) {
    MemoryReport::OpEntry oe{op->descriptor.id, 0, 0};
    for (const auto& t : op->tensors) {
      oe.nnz += t.tensor.nnz();
      oe.tensor_bytes += t.tensor.memory_bytes();
    }
    m.tensor_bytes += oe.tensor_bytes;
    m.ops.push_back(std::move(oe));
  }
  for (const auto& id : order_) {
    const Entry& e = datasets_.at(id);
    if (!e.data) continue;
    const std::size_t bytes = dataset_bytes(*e.data);
    m.materialized.push_back({id, e.rows, bytes});
    m.dataset_bytes += bytes;
  }
  m.total_bytes = m.tensor_bytes + m.dataset_bytes;
  return m;
}

void Pipeline::ensure_classes(const DatasetId& id, const Dataset* data) const {
  if (classes_.count(id)) return;
  if (data) {
    classes_.emplace(id, tensprov::duplicate_classes(*data));
  } else {
    classes_.emplace(id, tensprov::duplicate_classes(*dataset(id)));
  }
}

void Pipeline::ensure_canonical(const OpRecord& op) const {
  if (!op.canonical.empty() || op.tensors.empty()) return;
  const DatasetId& out = op.descriptor.output;
  ensure_classes(out, entry(out).data.get());
  const DuplicateClasses& classes = classes_.at(out);
  std::vector<CapturedTensor> canonical;
  for (const auto& t : op.tensors) canonical.push_back({t.role, to_set_semantics(t.tensor, classes)});
  op.canonical = std::move(canonical);
}

const DuplicateClasses& Pipeline::duplicate_classes(const DatasetId& id) const {
  std::lock_guard lock(lazy_mutex_);
  ensure_classes(id, entry(id).data.get());
  return classes_.at(id);
}

std::span<const CapturedTensor> Pipeline::tensors(const OpRecord& op, bool set_semantics) const {
  if (!set_semantics) return op.tensors;
  std::lock_guard lock(lazy_mutex_);
  ensure_canonical(op);
  return op.canonical;
}

}  // namespace tensprov
