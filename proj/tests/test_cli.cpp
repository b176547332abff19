#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <sys/wait.h>

#include "common.hpp"
#include "tensprov/bench.hpp"
#include "tensprov/spec.hpp"

using namespace tensprov;
using testing_support::data_path;

namespace {

json minimal_spec() {
  return json::parse(R"({
    "sources": [{"id": "dl", "path": "dl.csv"}],
    "ops": [{"id": "f", "name": "filter", "inputs": ["dl"], "output": "males",
             "params": {"where": {"column": "Gender", "op": "==", "value": "M"}}}]
  })");
}

std::optional<ErrorKind> parse_error_kind(const json& doc) {
  try {
    PipelineSpec spec = parse_spec(doc, data_path(""));
    Pipeline p(pipeline_options(spec));
    run_spec(spec, p);
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

struct Proc {
  int status = -1;
  std::string out;
};

Proc cli(const std::string& args, const std::string& env = "") {
  const auto session = std::filesystem::temp_directory_path() / "tensprov-test-session.json";
  const std::string cmd =
      "TENSPROV_SESSION='" + session.string() + "' " + env + " '" + TENSPROV_CLI + "' " + args + " 2>/dev/null";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, f)) p.out.append(buf, n);
  const int raw = pclose(f);
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return p;
}

std::string spec_arg(const std::string& name) { return "'" + data_path(name).string() + "'"; }

}  // namespace

TEST(Spec, MinimalRuns) {
  PipelineSpec spec = parse_spec(minimal_spec(), data_path(""));
  Pipeline p(pipeline_options(spec));
  const auto summary = run_spec(spec, p);
  ASSERT_EQ(summary.ops.size(), 1u);
  EXPECT_EQ(summary.ops[0].output_rows, 2u);
  EXPECT_EQ(summary.ops[0].category, OpCategory::HorizontalReduction);
}

TEST(Spec, UnknownOperationNamesTheOp) {
  json doc = minimal_spec();
  doc["ops"][0]["name"] = "frobnicate";
  try {
    parse_spec(doc, data_path(""));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'f'"), std::string::npos) << e.what();
  }
}

TEST(Spec, Errors) {

  json bad_column = minimal_spec();
  bad_column["ops"][0]["params"]["where"]["column"] = "Salary";
  EXPECT_EQ(parse_error_kind(bad_column), ErrorKind::NotFound);

  json wrong_category = minimal_spec();
  wrong_category["ops"][0]["category"] = "join";
  EXPECT_TRUE(parse_error_kind(wrong_category).has_value());

  json missing_file = minimal_spec();
  missing_file["sources"][0]["path"] = "absent.csv";
  EXPECT_EQ(parse_error_kind(missing_file), ErrorKind::Io);
}

TEST(Spec, EmptyOpsListsSourcesOnly) {
  json doc = minimal_spec();
  doc["ops"] = json::array();
  PipelineSpec spec = parse_spec(doc, data_path(""));
  Pipeline p(pipeline_options(spec));
  const json out = summary_to_json(run_spec(spec, p), p);
  EXPECT_TRUE(out.at("ops").empty());
  EXPECT_EQ(out.at("sources").size(), 1u);
}

TEST(Spec, RegisteredOperations) {
  const auto names = registered_operations();
  for (const char* n : {"filter", "join", "append", "one-hot", "impute-mean", "oversample", "drop-columns"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}

TEST(Spec, GermanSummary) {
  PipelineSpec spec = load_spec(data_path("german.json"));
  Pipeline p(pipeline_options(spec));
  const json out = summary_to_json(run_spec(spec, p), p);
  ASSERT_EQ(out.at("ops").size(), 4u);
  for (const auto& op : out.at("ops")) {
    EXPECT_TRUE(op.contains("nnz"));
    EXPECT_TRUE(op.contains("capture_ms"));
  }
  EXPECT_TRUE(out.contains("memory"));
}

TEST(Spec, DeterministicModuloTiming) {
  auto strip = [](json j) {
    j.erase("total_capture_ms");
    for (auto& op : j["ops"]) op.erase("capture_ms");
    return j.dump();
  };
  std::string first;
  for (int k = 0; k < 2; ++k) {
    PipelineSpec spec = load_spec(data_path("compas.json"));
    Pipeline p(pipeline_options(spec));
    const std::string s = strip(summary_to_json(run_spec(spec, p), p));
    if (k == 0) first = s;
    else EXPECT_EQ(first, s);
  }
}

TEST(Bench, RowsScaleWithSf) {
  BenchConfig c;
  c.rows_per_sf_left = 400;
  c.rows_per_sf_right = 400;
  c.query_samples = 5;
  c.scale_factor = 1;
  const auto r1 = run_bench(c);
  c.scale_factor = 2;
  const auto r2 = run_bench(c);
  EXPECT_EQ(r2.left_rows, 2 * r1.left_rows);
  EXPECT_NEAR(static_cast<double>(r2.out_rows) / r1.out_rows, 2.0, 0.3);
  EXPECT_GT(r1.input_csv_bytes, 0u);
  EXPECT_EQ(bench_csv_header(), "sf,left_rows,right_rows,out_rows,capture_ms,tensor_bytes,q1_avg_ms");
  EXPECT_EQ(bench_csv_row(r1).rfind("1,400,400,", 0), 0u);
}

TEST(Bench, SeedChangesData) {
  BenchConfig c;
  c.rows_per_sf_left = 200;
  c.rows_per_sf_right = 200;
  const auto a = generate_tables(c);
  const auto b = generate_tables(c);
  EXPECT_EQ(a.first.rows(), b.first.rows());
  c.seed = 7;
  EXPECT_NE(generate_tables(c).first.rows(), a.first.rows());
}

TEST(Binary, RunThenQueryUsesSession) {
  const auto run = cli("run " + spec_arg("example_join.json"));
  ASSERT_EQ(run.status, 0) << run.out;
  EXPECT_EQ(json::parse(run.out).at("ops").size(), 1u);

  const auto q = cli("query --type Q2 --dataset joinout --row 0 --src dl");
  ASSERT_EQ(q.status, 0) << q.out;
  const json j = json::parse(q.out);
  EXPECT_EQ(j.at("query"), "Q2");
  ASSERT_EQ(j.at("hits").size(), 1u);
  EXPECT_EQ(j["hits"][0]["row"], 1);
}

TEST(Binary, ErrorsAreJsonWithNonZeroExit) {
  const auto missing = cli("query --spec " + spec_arg("example_join.json") + " --type Q1 --dataset nope --row 0 --dst joinout");
  EXPECT_EQ(missing.status, 1);
  EXPECT_EQ(json::parse(missing.out).at("error").at("kind"), "not_found");

  const auto usage = cli("query --type Q1 --row abc");
  EXPECT_EQ(usage.status, 2);
  EXPECT_EQ(json::parse(usage.out).at("error").at("kind"), "usage");

  const auto bad_spec = cli("run /nonexistent/spec.json");
  EXPECT_EQ(bad_spec.status, 1);
  EXPECT_TRUE(json::parse(bad_spec.out).contains("error"));
}

TEST(Binary, SeedFromEnvironment) {
  const auto a = cli("bench --sf 1 --rows-left 50 --rows-right 50", "TENSPROV_SEED=9");
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(json::parse(a.out).at("seed"), 9);
  const auto b = cli("bench --sf 1 --rows-left 50 --rows-right 50 --seed 3", "TENSPROV_SEED=9");
  EXPECT_EQ(json::parse(b.out).at("seed"), 3);
  const auto bad = cli("bench --sf 1", "TENSPROV_SEED=x");
  EXPECT_EQ(bad.status, 1);
}

TEST(Binary, BenchCsv) {
  const auto r = cli("bench --sf 1,2 --rows-left 60 --rows-right 60 --csv");
  ASSERT_EQ(r.status, 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], bench_csv_header());
  EXPECT_EQ(lines[2].rfind("2,120,120,", 0), 0u);
}
