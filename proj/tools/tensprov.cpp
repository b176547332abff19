#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tensprov/bench.hpp"
#include "tensprov/json_io.hpp"
#include "tensprov/query.hpp"
#include "tensprov/spec.hpp"

namespace fs = std::filesystem;
using namespace tensprov;

namespace {

// `run` records the spec it executed so later `query` / `stats` calls can
// rebuild the same pipeline without --spec.
fs::path session_file() {
  if (const char* env = std::getenv("TENSPROV_SESSION")) return env;
  return ".tensprov-session.json";
}

std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("TENSPROV_SEED");
  if (!env || !*env) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string_view(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, std::string("TENSPROV_SEED is not an unsigned integer: '") + env + "'");
  }
}

PipelineSpec load_with_env(const fs::path& path) {
  PipelineSpec spec = load_spec(path);
  if (auto seed = env_seed()) spec.settings.seed = *seed;
  return spec;
}

fs::path resolve_spec(const std::string& flag) {
  if (!flag.empty()) return flag;
  std::ifstream in(session_file());
  if (!in) {
    throw Error(ErrorKind::NotFound, "no pipeline session: pass --spec or execute `tensprov run <spec.json>` first");
  }
  try {
    return json::parse(in).at("spec").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("session file: ") + e.what());
  }
}

struct QueryFlags {
  std::string type;
  std::string dataset;
  std::optional<std::int64_t> row;
  std::optional<std::int64_t> attr;
  std::string src;
  std::string dst;
  std::string other;
  bool resolve = false;
  bool set_semantics = false;
};

QueryRequest to_request(const QueryFlags& f) {
  QueryRequest r;
  r.type = parse_query_type(f.type);
  r.dataset = f.dataset;
  if (f.row) {
    if (*f.row < 0) throw Error(ErrorKind::InvalidArgument, "--row must be non-negative");
    r.row = static_cast<RowIndex>(*f.row);
  }
  if (f.attr) {
    if (*f.attr < 0) throw Error(ErrorKind::InvalidArgument, "--attr must be non-negative");
    r.attr = static_cast<std::size_t>(*f.attr);
  }
  switch (r.type) {
    case QueryType::Q1:
    case QueryType::Q3:
    case QueryType::Q5:
    case QueryType::Q7:
      r.other = !f.dst.empty() ? f.dst : f.other;
      break;
    case QueryType::Q2:
    case QueryType::Q4:
    case QueryType::Q6:
    case QueryType::Q8:
      r.other = !f.src.empty() ? f.src : f.other;
      break;
    case QueryType::Q9:
      break;
    case QueryType::Q10:
      r.other = !f.other.empty() ? f.other : f.src;
      break;
    case QueryType::Q11:
      r.other = !f.src.empty() ? f.src : f.other;
      r.third = f.dst;
      break;
  }
  r.resolve = f.resolve;
  r.options.set_semantics = f.set_semantics;
  return r;
}

QueryFlags flags_from_json(const json& j) {
  QueryFlags f;
  f.type = j.at("type").get<std::string>();
  f.dataset = j.value("dataset", "");
  if (j.contains("row")) f.row = j.at("row").get<std::int64_t>();
  if (j.contains("attr")) f.attr = j.at("attr").get<std::int64_t>();
  f.src = j.value("src", "");
  f.dst = j.value("dst", "");
  f.other = j.value("other", "");
  f.resolve = j.value("resolve", false);
  f.set_semantics = j.value("set_semantics", false);
  return f;
}

json answer(const Pipeline& p, const json& query) {
  try {
    return query_to_json(run_query(p, to_request(flags_from_json(query))));
  } catch (const Error& e) {
    return error_to_json(e.kind(), e.what());
  } catch (const json::exception& e) {
    return error_to_json(ErrorKind::Parse, e.what());
  }
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<std::size_t> parse_sf_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "--sf expects positive integers, got '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "--sf needs at least one scale factor");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-memory provenance capture and lineage queries for data-preparation pipelines"};
  app.require_subcommand(1);

  std::string run_spec_path;
  std::string query_file;
  bool interactive = false;
  auto* run = app.add_subcommand("run", "Execute a pipeline spec with provenance capture");
  run->add_option("spec", run_spec_path, "Pipeline spec (JSON)")->required();
  run->add_option("--query-file", query_file, "JSON list of queries to answer after the run");
  run->add_flag("--interactive,-i", interactive, "Read one JSON query per line from stdin");

  std::string query_spec;
  QueryFlags qf;
  auto* query = app.add_subcommand("query", "Answer one lineage query (Q1..Q11)");
  query->add_option("--spec", query_spec, "Pipeline spec; defaults to the last `run`");
  query->add_option("--type", qf.type, "Q1..Q11")->required();
  query->add_option("--dataset", qf.dataset, "Dataset of the queried record");
  query->add_option("--row", qf.row, "Row index (0-based)");
  query->add_option("--attr", qf.attr, "Attribute position (0-based)");
  query->add_option("--src", qf.src, "Source dataset (Q2, Q4, Q6, Q8; d1 for Q11)");
  query->add_option("--dst", qf.dst, "Target dataset (Q1, Q3, Q5, Q7; d3 for Q11)");
  query->add_option("--other", qf.other, "Second input dataset for Q10");
  query->add_flag("--resolve", qf.resolve, "Recompute and attach the hit records");
  query->add_flag("--set-semantics", qf.set_semantics, "Canonicalize duplicate rows");

  std::string stats_spec;
  auto* stats = app.add_subcommand("stats", "Memory report and per-operation capture statistics");
  stats->add_option("--spec", stats_spec, "Pipeline spec; defaults to the last `run`");

  std::string sf_list = "1,2,4,8";
  std::optional<std::uint64_t> bench_seed;
  bool csv = false;
  BenchConfig base;
  auto* bench = app.add_subcommand("bench", "Synthetic join scaling benchmark");
  bench->add_option("--sf", sf_list, "Comma-separated scale factors")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Generator seed (default 42, or TENSPROV_SEED)");
  bench->add_flag("--csv", csv, "Emit CSV instead of JSON");
  bench->add_option("--rows-left", base.rows_per_sf_left, "Left rows per scale factor")->capture_default_str();
  bench->add_option("--rows-right", base.rows_per_sf_right, "Right rows per scale factor")->capture_default_str();
  bench->add_option("--match-rate", base.match_rate, "Probability that a left key matches")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print({{"error", {{"kind", "usage"}, {"message", e.what()}}}});
    return 2;
  }

  try {
    if (*run) {
      const fs::path path = run_spec_path;
      const PipelineSpec spec = load_with_env(path);
      Pipeline p(pipeline_options(spec));
      const RunSummary summary = run_spec(spec, p);
      {
        std::ofstream session(session_file());
        if (session) session << json{{"spec", fs::absolute(path).string()}}.dump() << '\n';
      }
      json out = summary_to_json(summary, p);
      out["seed"] = spec.settings.seed;
      if (!query_file.empty()) {
        std::ifstream in(query_file);
        if (!in) throw Error(ErrorKind::Io, "cannot open query file '" + query_file + "'");
        json queries;
        try {
          queries = json::parse(in);
        } catch (const json::exception& e) {
          throw Error(ErrorKind::Parse, "query file: " + std::string(e.what()));
        }
        if (!queries.is_array()) throw Error(ErrorKind::Parse, "query file must hold a JSON list");
        json answers = json::array();
        for (const auto& q : queries) answers.push_back(answer(p, q));
        out["queries"] = std::move(answers);
      }
      if (interactive) {
        std::cout << out.dump() << '\n' << std::flush;
        std::string line;
        while (std::getline(std::cin, line)) {
          if (line.empty()) continue;
          if (line == "quit" || line == "exit") break;
          json q;
          try {
            q = json::parse(line);
          } catch (const json::exception& e) {
            std::cout << error_to_json(ErrorKind::Parse, e.what()).dump() << '\n' << std::flush;
            continue;
          }
          std::cout << answer(p, q).dump() << '\n' << std::flush;
        }
      } else {
        print(out);
      }
      return 0;
    }
    if (*query) {
      const PipelineSpec spec = load_with_env(resolve_spec(query_spec));
      Pipeline p(pipeline_options(spec));
      run_spec(spec, p);
      print(query_to_json(run_query(p, to_request(qf))));
      return 0;
    }
    if (*stats) {
      const PipelineSpec spec = load_with_env(resolve_spec(stats_spec));
      Pipeline p(pipeline_options(spec));
      const RunSummary summary = run_spec(spec, p);
      print(summary_to_json(summary, p));
      return 0;
    }
    if (*bench) {
      BenchConfig config = base;
      config.seed = bench_seed ? *bench_seed : env_seed().value_or(42);
      const auto sfs = parse_sf_list(sf_list);
      json rows = json::array();
      if (csv) std::cout << bench_csv_header() << '\n';
      for (auto sf : sfs) {
        config.scale_factor = sf;
        BenchResult r;
        try {
          r = run_bench(config);
        } catch (const std::bad_alloc&) {
          throw Error(ErrorKind::OutOfRange, "out of memory at scale factor " + std::to_string(sf));
        }
        if (csv) {
          std::cout << bench_csv_row(r) << '\n' << std::flush;
        } else {
          rows.push_back(bench_to_json(r));
        }
      }
      if (!csv) print({{"seed", config.seed}, {"match_rate", config.match_rate}, {"results", std::move(rows)}});
      return 0;
    }
  } catch (const Error& e) {
    print(error_to_json(e.kind(), e.what()));
    return 1;
  } catch (const std::exception& e) {
    print({{"error", {{"kind", "internal"}, {"message", e.what()}}}});
    return 1;
  }
  return 0;
}
