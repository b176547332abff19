#include "tensprov/spec.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "tensprov/csv.hpp"

namespace tensprov {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Parse, where + ": " + what);
}

std::size_t column_ref(const json& ref, const Schema& s, const std::string& where) {
  if (ref.is_number_integer()) {
    const auto pos = ref.get<std::int64_t>();
    if (pos < 0 || static_cast<std::size_t>(pos) >= s.size()) {
      throw Error(ErrorKind::OutOfRange, where + ": column position " + std::to_string(pos) + " out of range");
    }
    return static_cast<std::size_t>(pos);
  }
  if (ref.is_string()) {
    auto pos = s.find(ref.get<std::string>());
    if (!pos) throw Error(ErrorKind::NotFound, where + ": no column named '" + ref.get<std::string>() + "'");
    return *pos;
  }
  fail(where, "column reference must be a name or a position, got " + ref.dump());
}

std::vector<std::size_t> column_list(const json& refs, const Schema& s, const std::string& where) {
  std::vector<std::size_t> out;
  if (refs.is_array()) {
    for (const auto& r : refs) out.push_back(column_ref(r, s, where));
  } else {
    out.push_back(column_ref(refs, s, where));
  }
  return out;
}

const json& require(const json& params, const char* key, const std::string& where) {
  if (!params.contains(key)) fail(where, std::string("missing parameter '") + key + "'");
  return params.at(key);
}

template <typename T>
T get_or(const json& params, const char* key, T fallback, const std::string& where) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where, std::string("parameter '") + key + "' has the wrong type");
  }
}

Comparison comparison(const json& j, const Schema& s, const std::string& where) {
  Comparison c;
  c.column = column_ref(require(j, "column", where), s, where);
  c.op = parse_compare_op(get_or<std::string>(j, "op", "==", where));
  if (c.op != CompareOp::IsNull && c.op != CompareOp::NotNull) c.value = cell_from_json(require(j, "value", where));
  return c;
}

}  // namespace

std::vector<std::string> registered_operations() {
  std::vector<std::string> names;
  for (auto fn : {TransformFn::ImputeMean, TransformFn::ImputeMedian, TransformFn::ImputeMode,
                  TransformFn::ImputeConstant, TransformFn::Binarize, TransformFn::NormalizeMinMax,
                  TransformFn::Discretize, TransformFn::ValueMap}) {
    names.emplace_back(to_string(fn));
  }
  for (const char* n : {"drop-columns", "select-columns", "one-hot", "string-index", "derive", "filter", "dropna",
                        "sample", "undersample", "oversample", "join", "append"}) {
    names.emplace_back(n);
  }
  return names;
}

OpParams build_params(const OpSpec& op, const std::vector<const Schema*>& inputs, const SpecSettings& settings) {
  const std::string where = "operation '" + op.id + "' (" + op.name + ")";
  const json& p = op.params;
  if (!p.is_object()) fail(where, "params must be an object");
  const std::size_t arity = (op.name == "join" || op.name == "append") ? 2 : 1;
  if (inputs.size() != arity) {
    throw Error(ErrorKind::InvalidArgument,
                where + ": expects " + std::to_string(arity) + " input(s), got " + std::to_string(inputs.size()));
  }
  const Schema& s = *inputs[0];

  if (auto fn = parse_transform_fn(op.name)) {
    TransformParams t;
    t.fn = *fn;
    t.columns = column_list(require(p, "columns", where), s, where);
    t.threshold = get_or<double>(p, "threshold", 0.0, where);
    t.bins = get_or<std::size_t>(p, "bins", 4, where);
    if (p.contains("constant")) t.constant = cell_from_json(p.at("constant"));
    if (*fn == TransformFn::ImputeConstant && !p.contains("constant")) fail(where, "missing parameter 'constant'");
    if (p.contains("mapping")) {
      const json& m = p.at("mapping");
      if (m.is_object()) {
        for (const auto& [from, to] : m.items()) t.mapping.emplace_back(Cell::text(from), cell_from_json(to));
      } else if (m.is_array()) {
        for (const auto& pair : m) {
          if (!pair.is_array() || pair.size() != 2) fail(where, "mapping entries must be [from, to] pairs");
          t.mapping.emplace_back(cell_from_json(pair[0]), cell_from_json(pair[1]));
        }
      } else {
        fail(where, "mapping must be an object or a list of pairs");
      }
    } else if (*fn == TransformFn::ValueMap) {
      fail(where, "missing parameter 'mapping'");
    }
    return t;
  }
  if (op.name == "drop-columns") {
    const auto drop = column_list(require(p, "columns", where), s, where);
    if (drop.empty()) throw Error(ErrorKind::InvalidArgument, where + ": nothing to drop");
    std::set<std::size_t> gone(drop.begin(), drop.end());
    SelectParams sel;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!gone.count(i)) sel.kept.push_back(i);
    }
    if (sel.kept.empty()) throw Error(ErrorKind::InvalidArgument, where + ": cannot drop every column");
    return sel;
  }
  if (op.name == "select-columns") return SelectParams{column_list(require(p, "columns", where), s, where)};
  if (op.name == "one-hot") {
    OneHotParams o;
    o.column = column_ref(require(p, "column", where), s, where);
    o.cardinality_cap = get_or<std::size_t>(p, "cap", settings.onehot_cap, where);
    return o;
  }
  if (op.name == "string-index") return StringIndexParams{column_ref(require(p, "column", where), s, where), {}};
  if (op.name == "derive") {
    DeriveParams d;
    d.sources = column_list(require(p, "sources", where), s, where);
    const json& fns = require(p, "functions", where);
    if (fns.is_string()) {
      d.functions.push_back(parse_derive_fn(fns.get<std::string>()));
    } else {
      for (const auto& f : fns) d.functions.push_back(parse_derive_fn(f.get<std::string>()));
    }
    d.names = get_or<std::vector<std::string>>(p, "names", {}, where);
    return d;
  }
  if (op.name == "filter") {
    FilterParams f;
    const json& w = require(p, "where", where);
    if (w.is_array()) {
      for (const auto& c : w) f.predicate.all_of.push_back(comparison(c, s, where));
    } else {
      f.predicate.all_of.push_back(comparison(w, s, where));
    }
    return f;
  }
  if (op.name == "dropna") {
    DropNullParams d;
    if (p.contains("columns")) d.columns = column_list(p.at("columns"), s, where);
    return d;
  }
  if (op.name == "sample" || op.name == "undersample") {
    SampleParams sp;
    require(p, "fraction", where);
    sp.fraction = get_or<double>(p, "fraction", 1.0, where);
    sp.seed = get_or<std::uint64_t>(p, "seed", settings.seed, where);
    return sp;
  }
  if (op.name == "oversample") {
    OversampleParams o;
    o.target = column_ref(require(p, "target", where), s, where);
    o.strategy = parse_oversample_strategy(get_or<std::string>(p, "strategy", "duplicate-minority", where));
    o.sigma = get_or<double>(p, "sigma", 0.1, where);
    o.seed = get_or<std::uint64_t>(p, "seed", settings.seed, where);
    return o;
  }
  if (op.name == "join") {
    const Schema& r = *inputs[1];
    JoinParams j;
    j.kind = parse_join_kind(get_or<std::string>(p, "kind", "inner", where));
    if (p.contains("on")) {
      const json& on = p.at("on");
      auto add = [&](const json& l, const json& rr) {
        j.keys.emplace_back(column_ref(l, s, where + " left key"), column_ref(rr, r, where + " right key"));
      };
      if (on.is_string()) {
        add(on, on);
      } else {
        for (const auto& k : on) {
          if (k.is_array() && k.size() == 2) {
            add(k[0], k[1]);
          } else {
            add(k, k);
          }
        }
      }
    } else {
      const auto l = column_list(require(p, "left_on", where), s, where + " left key");
      const auto rr = column_list(require(p, "right_on", where), r, where + " right key");
      if (l.size() != rr.size()) fail(where, "left_on and right_on differ in length");
      for (std::size_t k = 0; k < l.size(); ++k) j.keys.emplace_back(l[k], rr[k]);
    }
    return j;
  }
  if (op.name == "append") return AppendParams{};
  throw Error(ErrorKind::InvalidArgument, where + ": unknown operation name '" + op.name + "'");
}

PipelineSpec parse_spec(const json& doc, const std::filesystem::path& base_dir) {
  PipelineSpec spec;
  if (!doc.is_object()) fail("spec", "top level must be an object");
  try {
    if (doc.contains("settings")) {
      const json& st = doc.at("settings");
      spec.settings.seed = st.value("seed", std::uint64_t{0});
      spec.settings.set_semantics = st.value("set_semantics", false);
      spec.settings.onehot_cap = st.value("onehot_cap", std::size_t{64});
    }
    std::set<std::string> ids;
    for (const auto& s : doc.value("sources", json::array())) {
      SourceSpec src;
      src.id = s.at("id").get<std::string>();
      src.path = base_dir / s.at("path").get<std::string>();
      src.header = s.value("header", true);
      if (s.contains("types")) {
        for (const auto& [col, t] : s.at("types").items()) src.types[col] = parse_cell_type(t.get<std::string>());
      }
      if (!ids.insert(src.id).second) fail("source '" + src.id + "'", "duplicate dataset id");
      spec.sources.push_back(std::move(src));
    }
    std::set<std::string> op_ids;
    const auto known = registered_operations();
    for (const auto& o : doc.value("ops", json::array())) {
      OpSpec op;
      op.id = o.at("id").get<std::string>();
      const std::string where = "operation '" + op.id + "'";
      op.name = o.at("name").get<std::string>();
      if (std::find(known.begin(), known.end(), op.name) == known.end()) {
        throw Error(ErrorKind::InvalidArgument, where + ": unknown operation name '" + op.name + "'");
      }
      if (o.contains("category")) op.category = parse_op_category(o.at("category").get<std::string>());
      op.inputs = o.at("inputs").get<std::vector<std::string>>();
      op.output = o.at("output").get<std::string>();
      op.params = o.value("params", json::object());
      if (!op_ids.insert(op.id).second) fail(where, "duplicate operation id");
      for (const auto& in : op.inputs) {
        if (!ids.count(in)) fail(where, "input '" + in + "' is not produced by an earlier source or operation");
      }
      if (!ids.insert(op.output).second) fail(where, "output '" + op.output + "' is already defined");
      spec.ops.push_back(std::move(op));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("spec: ") + e.what());
  }
  return spec;
}

PipelineSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open spec '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, "spec '" + path.string() + "': " + e.what());
  }
  return parse_spec(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

PipelineOptions pipeline_options(const PipelineSpec& spec) {
  PipelineOptions o;
  o.set_semantics = spec.settings.set_semantics;
  return o;
}

RunSummary run_spec(const PipelineSpec& spec, Pipeline& p) {
  for (const auto& src : spec.sources) {
    CsvOptions opts;
    opts.has_header = src.header;
    opts.type_hints = src.types;
    p.add_source(load_csv(src.path.string(), src.id, opts));
  }
  RunSummary summary;
  for (const auto& op : spec.ops) {
    std::vector<std::shared_ptr<const Dataset>> held;
    std::vector<const Dataset*> ptrs;
    std::vector<const Schema*> schemas;
    for (const auto& in : op.inputs) {
      held.push_back(p.dataset(in));
      ptrs.push_back(held.back().get());
      schemas.push_back(&held.back()->schema());
    }
    const OpParams params = build_params(op, schemas, spec.settings);
    const auto start = std::chrono::steady_clock::now();
    CaptureResult r = execute({op.id, op.output}, params, ptrs);
    const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
    if (op.category && *op.category != r.descriptor.category) {
      throw Error(ErrorKind::InvalidArgument, "operation '" + op.id + "': '" + op.name + "' is a " +
                                                  std::string(to_string(r.descriptor.category)) + " operation, not " +
                                                  std::string(to_string(*op.category)));
    }
    r.descriptor.name = op.name;
    held.clear();
    const OpRecord& rec = p.register_capture(std::move(r), took.count());
    OpSummary s{op.id, op.name, rec.descriptor.category, p.row_count(op.output), 0, 0, rec.capture_ms};
    for (const auto& t : rec.tensors) {
      s.nnz += t.tensor.nnz();
      s.tensor_bytes += t.tensor.memory_bytes();
    }
    summary.total_capture_ms += s.capture_ms;
    summary.ops.push_back(std::move(s));
  }
  return summary;
}

json summary_to_json(const RunSummary& s, const Pipeline& p) {
  json ops = json::array();
  for (const auto& o : s.ops) {
    ops.push_back({{"id", o.id},
                   {"name", o.name},
                   {"category", std::string(to_string(o.category))},
                   {"output_rows", o.output_rows},
                   {"nnz", o.nnz},
                   {"tensor_bytes", o.tensor_bytes},
                   {"capture_ms", round_ms(o.capture_ms)}});
  }
  json sources = json::array();
  for (const auto& id : p.dataset_ids()) {
    if (p.is_source(id)) sources.push_back({{"id", id}, {"rows", p.row_count(id)}});
  }
  return {{"sources", std::move(sources)},
          {"ops", std::move(ops)},
          {"total_capture_ms", round_ms(s.total_capture_ms)},
          {"materialized", p.materialized_ids()},
          {"memory", memory_to_json(p.memory_report())}};
}

}  // namespace tensprov
