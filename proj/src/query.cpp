#include "tensprov/query.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <set>

#include "tensprov/error.hpp"

namespace tensprov {

namespace {

// Attribute key for record-level traversal.
constexpr std::size_t kRecord = std::numeric_limits<std::size_t>::max();

// Rows reached so far, per attribute position (or kRecord).
using State = std::map<std::size_t, RowSet>;

RowSet unite(const RowSet& a, const RowSet& b) {
  RowSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void merge_into(State& into, std::size_t attr, const RowSet& rows) {
  if (rows.empty()) return;
  auto& slot = into[attr];
  slot = slot.empty() ? rows : unite(slot, rows);
}

void check_record(const Pipeline& p, const RecordRef& r) {
  if (r.row >= p.row_count(r.dataset)) {
    throw Error(ErrorKind::OutOfRange, "row " + std::to_string(r.row) + " out of range for dataset '" + r.dataset +
                                           "' (" + std::to_string(p.row_count(r.dataset)) + " rows)");
  }
}

void check_cell(const Pipeline& p, const CellRef& c) {
  check_record(p, c.record);
  if (c.attr >= p.schema(c.record.dataset).size()) {
    throw Error(ErrorKind::OutOfRange, "attribute " + std::to_string(c.attr) + " out of range for dataset '" +
                                           c.record.dataset + "'");
  }
}

std::vector<std::size_t> attr_forward(const OpDescriptor& op, std::size_t side, std::size_t a) {
  if (a == kRecord) return {kRecord};
  switch (op.category) {
    case OpCategory::VerticalReduction:
    case OpCategory::VerticalAugmentation:
      return op.bitsets.at(0).forward(a);
    case OpCategory::Join:
    case OpCategory::Append:
      return op.bitsets.at(side).forward(a);
    default:
      return {identity_attr_map(a)};
  }
}

std::vector<std::size_t> attr_backward(const OpDescriptor& op, std::size_t side, std::size_t a) {
  if (a == kRecord) return {kRecord};
  switch (op.category) {
    case OpCategory::VerticalReduction:
    case OpCategory::VerticalAugmentation:
      return op.bitsets.at(0).backward(a);
    case OpCategory::Join:
    case OpCategory::Append:
      return op.bitsets.at(side).backward(a);
    default:
      return {identity_attr_map(a)};
  }
}

// Tensors linking input `side` of an operation to its output.
std::vector<TensorBinding> side_bindings(const OpRecord& op, std::size_t side) {
  std::vector<TensorBinding> out;
  for (std::size_t t = 0; t < op.tensors.size(); ++t) {
    switch (op.tensors[t].role) {
      case TensorRole::Main:
        out.push_back({t, op.descriptor.category == OpCategory::Join ? 1 + side : 1, side});
        break;
      case TensorRole::LeftSide:
        if (side == 0) out.push_back({t, 1, side});
        break;
      case TensorRole::RightSide:
        if (side == 1) out.push_back({t, 1, side});
        break;
    }
  }
  return out;
}

struct Traversal {
  const Pipeline& p;
  const QueryOptions& opts;

  RowSet canonical(const DatasetId& d, const RowSet& rows) const {
    if (!opts.set_semantics) return rows;
    return p.duplicate_classes(d).canonicalize(rows);
  }
  RowSet expanded(const DatasetId& d, const RowSet& rows) const {
    if (!opts.set_semantics) return rows;
    return p.duplicate_classes(d).expand(rows);
  }

  State forward(const PathHop& hop, const State& in) const {
    const auto tensors = p.tensors(*hop.op, opts.set_semantics);
    State out;
    for (const auto& [attr, rows] : in) {
      const RowSet seed = expanded(hop.input, rows);
      for (const auto& b : hop.bindings) {
        const RowSet hit = project(slice(tensors[b.tensor].tensor, b.in_dim, seed), 0);
        for (auto a : attr_forward(hop.op->descriptor, b.side, attr)) merge_into(out, a, hit);
      }
    }
    return out;
  }

  // Contributions of every input side; index k matches descriptor.inputs[k].
  std::vector<State> backward(const OpRecord& op, const State& out_state) const {
    const auto& desc = op.descriptor;
    const auto tensors = p.tensors(op, opts.set_semantics);
    std::vector<State> sides(desc.inputs.size());
    for (const auto& [attr, rows] : out_state) {
      const RowSet seed = canonical(desc.output, rows);
      for (std::size_t side = 0; side < desc.inputs.size(); ++side) {
        for (const auto& b : side_bindings(op, side)) {
          const RowSet hit =
              canonical(desc.inputs[side], project(slice(tensors[b.tensor].tensor, 0, seed), b.in_dim));
          for (auto a : attr_backward(desc, side, attr)) merge_into(sides[side], a, hit);
        }
      }
    }
    return sides;
  }

  State along_backward(const PathHop& hop, const State& out_state) const {
    const auto sides = backward(*hop.op, out_state);
    State in;
    for (std::size_t side = 0; side < sides.size(); ++side) {
      if (hop.op->descriptor.inputs[side] != hop.input) continue;
      for (const auto& [a, rows] : sides[side]) merge_into(in, a, rows);
    }
    return in;
  }
};

std::vector<Hit> hits_of(const DatasetId& d, const State& s) {
  std::vector<Hit> hits;
  for (const auto& [attr, rows] : s) {
    for (RowIndex r : rows) {
      hits.push_back({d, r, attr == kRecord ? std::nullopt : std::optional<std::size_t>(attr)});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.dataset != b.dataset) return a.dataset < b.dataset;
    if (a.row != b.row) return a.row < b.row;
    return a.attr < b.attr;
  });
  return hits;
}

State seed_state(const Traversal& tr, const DatasetId& d, RowIndex row, std::size_t attr) {
  State s;
  s[attr] = tr.canonical(d, {row});
  return s;
}

State trace_forward(const Traversal& tr, const DatasetId& src, State state, const DatasetId& dst,
                    std::vector<HowStep>* how) {
  if (src == dst) return state;
  for (const auto& hop : tr.p.dataflow_path(src, dst)) {
    State next = tr.forward(hop, state);
    if (how) {
      how->push_back({hop.op->descriptor.id, hop.op->descriptor.name, hop.op->descriptor.category,
                      hits_of(hop.input, state), hits_of(hop.output, next)});
    }
    state = std::move(next);
  }
  return state;
}

State trace_backward(const Traversal& tr, const DatasetId& from, State state, const DatasetId& src,
                     std::vector<HowStep>* how) {
  if (from == src) return state;
  auto hops = tr.p.dataflow_path(src, from);
  for (auto it = hops.rbegin(); it != hops.rend(); ++it) {
    const auto& desc = it->op->descriptor;
    if (how) {
      const auto sides = tr.backward(*it->op, state);
      HowStep step{desc.id, desc.name, desc.category, {}, hits_of(it->output, state)};
      for (std::size_t k = 0; k < sides.size(); ++k) {
        auto h = hits_of(desc.inputs[k], sides[k]);
        step.inputs.insert(step.inputs.end(), h.begin(), h.end());
      }
      how->push_back(std::move(step));
    }
    state = tr.along_backward(*it, state);
  }
  return state;
}

std::vector<RecordRef> records_of(const DatasetId& d, const State& s) {
  std::vector<RecordRef> out;
  if (auto it = s.find(kRecord); it != s.end()) {
    for (RowIndex r : it->second) out.push_back({d, r});
  }
  return out;
}

std::vector<CellRef> cells_of(const DatasetId& d, const State& s) {
  std::vector<CellRef> out;
  for (const auto& h : hits_of(d, s)) out.push_back({{h.dataset, h.row}, *h.attr});
  return out;
}

}  // namespace

std::vector<RecordRef> q_forward_records(const Pipeline& p, const RecordRef& src, const DatasetId& dst,
                                         const QueryOptions& opts) {
  check_record(p, src);
  Traversal tr{p, opts};
  return records_of(dst, trace_forward(tr, src.dataset, seed_state(tr, src.dataset, src.row, kRecord), dst, nullptr));
}

std::vector<RecordRef> q_backward_records(const Pipeline& p, const RecordRef& dst_rec, const DatasetId& src,
                                          const QueryOptions& opts) {
  check_record(p, dst_rec);
  Traversal tr{p, opts};
  return records_of(
      src, trace_backward(tr, dst_rec.dataset, seed_state(tr, dst_rec.dataset, dst_rec.row, kRecord), src, nullptr));
}

std::vector<CellRef> q_forward_attr(const Pipeline& p, const CellRef& src, const DatasetId& dst,
                                    const QueryOptions& opts) {
  check_cell(p, src);
  Traversal tr{p, opts};
  const auto& d = src.record.dataset;
  return cells_of(dst, trace_forward(tr, d, seed_state(tr, d, src.record.row, src.attr), dst, nullptr));
}

std::vector<CellRef> q_backward_attr(const Pipeline& p, const CellRef& dst_cell, const DatasetId& src,
                                     const QueryOptions& opts) {
  check_cell(p, dst_cell);
  Traversal tr{p, opts};
  const auto& d = dst_cell.record.dataset;
  return cells_of(src, trace_backward(tr, d, seed_state(tr, d, dst_cell.record.row, dst_cell.attr), src, nullptr));
}

std::vector<HowStep> q_how_records(const Pipeline& p, const RecordRef& rec, const DatasetId& other,
                                   Direction direction, const QueryOptions& opts) {
  check_record(p, rec);
  Traversal tr{p, opts};
  std::vector<HowStep> how;
  State seed = seed_state(tr, rec.dataset, rec.row, kRecord);
  if (direction == Direction::Forward) {
    trace_forward(tr, rec.dataset, std::move(seed), other, &how);
  } else {
    trace_backward(tr, rec.dataset, std::move(seed), other, &how);
  }
  return how;
}

std::vector<HowStep> q_how_attr(const Pipeline& p, const CellRef& cell, const DatasetId& other,
                                Direction direction, const QueryOptions& opts) {
  check_cell(p, cell);
  Traversal tr{p, opts};
  std::vector<HowStep> how;
  State seed = seed_state(tr, cell.record.dataset, cell.record.row, cell.attr);
  if (direction == Direction::Forward) {
    trace_forward(tr, cell.record.dataset, std::move(seed), other, &how);
  } else {
    trace_backward(tr, cell.record.dataset, std::move(seed), other, &how);
  }
  return how;
}

std::vector<const OpDescriptor*> q_all_transformations(const Pipeline& p, const DatasetId& d) {
  p.schema(d);
  std::set<const OpRecord*> upstream;
  std::vector<DatasetId> stack{d};
  while (!stack.empty()) {
    const DatasetId cur = stack.back();
    stack.pop_back();
    const OpRecord* op = p.producer(cur);
    if (!op || !upstream.insert(op).second) continue;
    for (const auto& in : op->descriptor.inputs) stack.push_back(in);
  }
  std::vector<const OpDescriptor*> out;
  for (const auto& op : p.ops()) {
    if (upstream.count(op.get())) out.push_back(&op->descriptor);
  }
  return out;
}

namespace {

// Hop count of the dataflow path, or nullopt when src does not reach dst.
std::optional<std::size_t> distance(const Pipeline& p, const DatasetId& src, const DatasetId& dst) {
  if (src == dst) return 0;
  if (!p.reaches(src, dst)) return std::nullopt;
  std::map<DatasetId, std::size_t> dist{{src, 0}};
  std::vector<DatasetId> frontier{src};
  while (!frontier.empty()) {
    std::vector<DatasetId> next;
    for (const auto& d : frontier) {
      for (const OpRecord* op : p.consumers(d)) {
        const auto& out = op->descriptor.output;
        if (dist.count(out)) continue;
        dist[out] = dist[d] + 1;
        if (out == dst) return dist[out];
        next.push_back(out);
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace

std::vector<RecordRef> q_co_contributory(const Pipeline& p, const RecordRef& d1_rec, const DatasetId& d2,
                                         const QueryOptions& opts) {
  check_record(p, d1_rec);
  p.schema(d2);
  const OpRecord* best = nullptr;
  std::size_t best_side = 0;
  std::size_t best_cost = std::numeric_limits<std::size_t>::max();
  for (const auto& op : p.ops()) {
    const auto& desc = op->descriptor;
    if (desc.category != OpCategory::Join) continue;
    for (std::size_t a = 0; a < 2; ++a) {
      const auto da = distance(p, d1_rec.dataset, desc.inputs[a]);
      const auto db = distance(p, d2, desc.inputs[1 - a]);
      if (!da || !db) continue;
      const std::size_t cost = *da + *db;
      if (cost < best_cost) {
        best = op.get();
        best_side = a;
        best_cost = cost;
      }
    }
  }
  if (!best) {
    throw Error(ErrorKind::NoPath, "no join combines records of '" + d1_rec.dataset + "' with '" + d2 + "'");
  }
  Traversal tr{p, opts};
  const auto& desc = best->descriptor;
  const DatasetId& mine = desc.inputs[best_side];
  const DatasetId& theirs = desc.inputs[1 - best_side];
  State at_join = trace_forward(tr, d1_rec.dataset, seed_state(tr, d1_rec.dataset, d1_rec.row, kRecord), mine, nullptr);
  RowSet rows = at_join.count(kRecord) ? tr.expanded(mine, at_join[kRecord]) : RowSet{};
  const ProvTensor* main = nullptr;
  for (const auto& t : best->tensors) {
    if (t.role == TensorRole::Main) main = &t.tensor;
  }
  State partner;
  merge_into(partner, kRecord,
             tr.canonical(theirs, project(slice(*main, 1 + best_side, rows), 2 - best_side)));
  return records_of(d2, trace_backward(tr, theirs, std::move(partner), d2, nullptr));
}

std::vector<RecordRef> q_co_dependency(const Pipeline& p, const RecordRef& d2_rec, const DatasetId& d1,
                                       const DatasetId& d3, const QueryOptions& opts) {
  check_record(p, d2_rec);
  Traversal tr{p, opts};
  State ancestors =
      trace_backward(tr, d2_rec.dataset, seed_state(tr, d2_rec.dataset, d2_rec.row, kRecord), d1, nullptr);
  if (ancestors.empty()) {
    p.schema(d3);
    if (d1 != d3) p.dataflow_path(d1, d3);
    return {};
  }
  return records_of(d3, trace_forward(tr, d1, std::move(ancestors), d3, nullptr));
}

ProvTensor whole_dataset_mapping(const Pipeline& p, const DatasetId& src, const DatasetId& dst) {
  std::optional<ProvTensor> acc;
  for (const auto& hop : p.dataflow_path(src, dst)) {
    std::vector<ProvTensor> parts;
    for (const auto& b : hop.bindings) {
      const ProvTensor& t = hop.op->tensors[b.tensor].tensor;
      if (t.order() == 2) {
        parts.push_back(t);
      } else {
        const std::size_t keep[] = {0, b.in_dim};
        parts.push_back(project_dims(t, keep));
      }
    }
    ProvTensor step;
    if (parts.size() == 1) {
      step = std::move(parts[0]);
    } else {
      std::vector<RowIndex> entries;
      for (const auto& part : parts) {
        const LeafSet l = part.leaves();
        entries.insert(entries.end(), l.entries.begin(), l.entries.end());
      }
      step = ProvTensor::from_leaves(parts[0].dims(), std::move(entries));
    }
    acc = acc ? compose(*acc, step, 1) : std::move(step);
  }
  return std::move(*acc);
}

std::string_view to_string(QueryType q) {
  static constexpr std::string_view names[] = {"Q1", "Q2", "Q3", "Q4", "Q5", "Q6",
                                               "Q7", "Q8", "Q9", "Q10", "Q11"};
  return names[static_cast<std::size_t>(q)];
}

QueryType parse_query_type(std::string_view name) {
  for (std::size_t k = 0; k <= static_cast<std::size_t>(QueryType::Q11); ++k) {
    const auto q = static_cast<QueryType>(k);
    std::string upper(name);
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (to_string(q) == upper) return q;
  }
  throw Error(ErrorKind::Parse, "unknown query type '" + std::string(name) + "' (expected Q1..Q11)");
}

namespace {

RecordRef need_record(const QueryRequest& r) {
  if (r.dataset.empty()) throw Error(ErrorKind::InvalidArgument, std::string(to_string(r.type)) + " needs --dataset");
  if (!r.row) throw Error(ErrorKind::InvalidArgument, std::string(to_string(r.type)) + " needs --row");
  return {r.dataset, *r.row};
}

CellRef need_cell(const QueryRequest& r) {
  if (!r.attr) throw Error(ErrorKind::InvalidArgument, std::string(to_string(r.type)) + " needs --attr");
  return {need_record(r), *r.attr};
}

const DatasetId& need_other(const QueryRequest& r, std::string_view flag) {
  if (r.other.empty()) {
    throw Error(ErrorKind::InvalidArgument, std::string(to_string(r.type)) + " needs --" + std::string(flag));
  }
  return r.other;
}

std::vector<Hit> to_hits(const std::vector<RecordRef>& refs) {
  std::vector<Hit> hits;
  for (const auto& r : refs) hits.push_back({r.dataset, r.row, std::nullopt});
  return hits;
}

std::vector<Hit> to_hits(const std::vector<CellRef>& refs) {
  std::vector<Hit> hits;
  for (const auto& c : refs) hits.push_back({c.record.dataset, c.record.row, c.attr});
  return hits;
}

}  // namespace

QueryResult run_query(const Pipeline& p, const QueryRequest& r) {
  QueryResult out;
  out.type = r.type;
  const auto start = std::chrono::steady_clock::now();
  const auto& o = r.options;
  switch (r.type) {
    case QueryType::Q1: out.hits = to_hits(q_forward_records(p, need_record(r), need_other(r, "dst"), o)); break;
    case QueryType::Q2: out.hits = to_hits(q_backward_records(p, need_record(r), need_other(r, "src"), o)); break;
    case QueryType::Q3: out.hits = to_hits(q_forward_attr(p, need_cell(r), need_other(r, "dst"), o)); break;
    case QueryType::Q4: out.hits = to_hits(q_backward_attr(p, need_cell(r), need_other(r, "src"), o)); break;
    case QueryType::Q5:
      out.how = q_how_records(p, need_record(r), need_other(r, "dst"), Direction::Forward, o);
      break;
    case QueryType::Q6:
      out.how = q_how_records(p, need_record(r), need_other(r, "src"), Direction::Backward, o);
      break;
    case QueryType::Q7: out.how = q_how_attr(p, need_cell(r), need_other(r, "dst"), Direction::Forward, o); break;
    case QueryType::Q8: out.how = q_how_attr(p, need_cell(r), need_other(r, "src"), Direction::Backward, o); break;
    case QueryType::Q9:
      if (r.dataset.empty()) throw Error(ErrorKind::InvalidArgument, "Q9 needs --dataset");
      out.ops = q_all_transformations(p, r.dataset);
      break;
    case QueryType::Q10: out.hits = to_hits(q_co_contributory(p, need_record(r), need_other(r, "other"), o)); break;
    case QueryType::Q11:
      if (r.third.empty()) throw Error(ErrorKind::InvalidArgument, "Q11 needs --third");
      out.hits = to_hits(q_co_dependency(p, need_record(r), need_other(r, "src"), r.third, o));
      break;
  }
  // Last-hop hits of how-traces are what --resolve fetches.
  if (r.resolve) {
    std::vector<Hit> targets = out.hits;
    if (!out.how.empty()) {
      const auto& last = out.how.back();
      targets = r.type == QueryType::Q5 || r.type == QueryType::Q7 ? last.outputs : last.inputs;
    }
    std::map<DatasetId, std::vector<RowIndex>> by_dataset;
    for (const auto& h : targets) by_dataset[h.dataset].push_back(h.row);
    for (auto& [d, rows] : by_dataset) {
      rows = make_row_set(std::move(rows));
      out.resolved.push_back(p.recompute_records(d, rows));
    }
  }
  const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
  out.timing_ms = took.count();
  return out;
}

}  // namespace tensprov
