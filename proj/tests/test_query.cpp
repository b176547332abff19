#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "common.hpp"
#include "oracle/oracle.hpp"
#include "tensprov/error.hpp"
#include "tensprov/query.hpp"

using namespace tensprov;
using testing_support::kFixtureSpecs;
using testing_support::load_pipeline;
using testing_support::example_left;
using testing_support::example_right;

namespace {

std::vector<RowIndex> rows(const std::vector<RecordRef>& refs) {
  std::vector<RowIndex> out;
  for (const auto& r : refs) out.push_back(r.row);
  return out;
}

std::vector<std::size_t> attrs(const std::vector<CellRef>& cells) {
  std::set<std::size_t> s;
  for (const auto& c : cells) s.insert(c.attr);
  return {s.begin(), s.end()};
}

std::unique_ptr<Pipeline> example_join() { return load_pipeline("example_join.json"); }

// Every (source, reachable dataset) pair with a unique dataflow path.
std::vector<std::pair<DatasetId, DatasetId>> path_pairs(const Pipeline& p) {
  std::vector<std::pair<DatasetId, DatasetId>> out;
  for (const auto& s : p.dataset_ids()) {
    for (const auto& d : p.dataset_ids()) {
      if (s != d && p.reaches(s, d)) out.emplace_back(s, d);
    }
  }
  return out;
}

}  // namespace

TEST(Q1, ExampleJoin) {
  auto p = example_join();
  EXPECT_EQ(rows(q_forward_records(*p, {"dl", 1}, "joinout")), (std::vector<RowIndex>{0}));
  EXPECT_TRUE(q_forward_records(*p, {"dl", 0}, "joinout").empty());
  EXPECT_EQ(rows(q_forward_records(*p, {"dr", 1}, "joinout")), (std::vector<RowIndex>{1}));
}

TEST(Q1, IdentityChainMapsRowToItself) {
  auto p = load_pipeline("german.json");
  for (RowIndex r : {0u, 17u, 299u}) {
    EXPECT_EQ(rows(q_forward_records(*p, {"german", r}, "g_out")), (std::vector<RowIndex>{r}));
  }
}

TEST(Q1, ErrorsOnBadInput) {
  auto p = example_join();
  EXPECT_THROW(q_forward_records(*p, {"dl", 9}, "joinout"), Error);
  EXPECT_THROW(q_forward_records(*p, {"nope", 0}, "joinout"), Error);
  EXPECT_THROW(q_forward_records(*p, {"joinout", 0}, "dl"), Error);
}

TEST(Q2, ExampleJoinAndAppend) {
  auto p = example_join();
  EXPECT_EQ(rows(q_backward_records(*p, {"joinout", 0}, "dl")), (std::vector<RowIndex>{1}));
  EXPECT_EQ(rows(q_backward_records(*p, {"joinout", 0}, "dr")), (std::vector<RowIndex>{0}));

  auto a = load_pipeline("example_append.json");
  EXPECT_EQ(rows(q_backward_records(*a, {"appended", 4}, "dr")), (std::vector<RowIndex>{0}));
  EXPECT_TRUE(q_backward_records(*a, {"appended", 4}, "dl").empty());
  EXPECT_EQ(rows(q_backward_records(*a, {"appended", 2}, "dl")), (std::vector<RowIndex>{2}));
}

TEST(Q2, FilteredRowsNeverAppear) {
  auto p = load_pipeline("compas.json");
  const auto n = p->row_count("c_out");
  std::set<RowIndex> seen;
  for (RowIndex r = 0; r < n; ++r) {
    for (auto s : rows(q_backward_records(*p, {"c_out", r}, "compas"))) seen.insert(s);
  }
  const auto src = p->dataset("compas");
  const auto dsb = src->schema().position_of("days_b_screening");
  for (RowIndex s : seen) {
    const Cell& c = src->cell(s, dsb);
    ASSERT_FALSE(c.is_null());
    EXPECT_LE(std::abs(c.numeric()), 30.0);
  }
}

TEST(Q3, DroppedAttributeHasNoImage) {
  Pipeline p;
  p.add_source(example_left());
  const std::size_t drop[] = {1};
  p.register_capture(drop_columns({"d", "dropped"}, *p.dataset("dl"), drop));
  EXPECT_TRUE(q_forward_attr(p, {{"dl", 2}, 1}, "dropped").empty());
  const auto hit = q_forward_attr(p, {{"dl", 2}, 2}, "dropped");
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0], (CellRef{{"dropped", 2}, 1}));
}

TEST(Q4, JoinAttributesTraceToTheirSide) {
  auto p = example_join();
  EXPECT_EQ(attrs(q_backward_attr(*p, {{"joinout", 0}, 3}, "dr")), (std::vector<std::size_t>{1}));
  EXPECT_TRUE(q_backward_attr(*p, {{"joinout", 0}, 3}, "dl").empty());
  EXPECT_EQ(attrs(q_backward_attr(*p, {{"joinout", 0}, 0}, "dl")), (std::vector<std::size_t>{0}));
  EXPECT_EQ(attrs(q_backward_attr(*p, {{"joinout", 0}, 0}, "dr")), (std::vector<std::size_t>{0}));
}

TEST(Q4, DerivedColumnFansOutToItsSources) {
  Pipeline p;
  p.add_source(example_left());
  p.run({"dv", "derived"}, DeriveParams{{0, 2}, {DeriveFn::Concat}, {"id_gender"}}, {"dl"});
  EXPECT_EQ(attrs(q_backward_attr(p, {{"derived", 1}, 3}, "dl")), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(attrs(q_backward_attr(p, {{"derived", 1}, 1}, "dl")), (std::vector<std::size_t>{1}));
}

TEST(Q5Q6, StepsFollowExecutionOrder) {
  auto p = load_pipeline("german.json");
  const auto fwd = q_how_records(*p, {"german", 5}, "g_out", Direction::Forward);
  ASSERT_EQ(fwd.size(), 4u);
  EXPECT_EQ(fwd[0].op_id, "g1");
  EXPECT_EQ(fwd[3].op_id, "g4");
  for (std::size_t k = 0; k + 1 < fwd.size(); ++k) EXPECT_EQ(fwd[k].outputs, fwd[k + 1].inputs);
  ASSERT_EQ(fwd.back().outputs.size(), 1u);
  EXPECT_EQ(fwd.back().outputs[0], (Hit{"g_out", 5, std::nullopt}));

  const auto bwd = q_how_records(*p, {"g_out", 5}, "german", Direction::Backward);
  ASSERT_EQ(bwd.size(), 4u);
  EXPECT_EQ(bwd[0].op_id, "g4");
  EXPECT_EQ(bwd[3].op_id, "g1");
  EXPECT_EQ(bwd.back().inputs, (std::vector<Hit>{{"german", 5, std::nullopt}}));
}

TEST(Q5Q6, JoinStepNamesBothSides) {
  auto p = example_join();
  const auto how = q_how_records(*p, {"joinout", 1}, "dl", Direction::Backward);
  ASSERT_EQ(how.size(), 1u);
  EXPECT_EQ(how[0].category, OpCategory::Join);
  std::set<DatasetId> sides;
  for (const auto& h : how[0].inputs) sides.insert(h.dataset);
  EXPECT_EQ(sides, (std::set<DatasetId>{"dl", "dr"}));
}

TEST(Q7Q8, AttributeStepsCarryPositions) {
  auto p = load_pipeline("german.json");
  // purpose (attr 3) is dropped by g1, so the trace stops there.
  const auto dropped = q_how_attr(*p, {{"german", 0}, 3}, "g_out", Direction::Forward);
  ASSERT_FALSE(dropped.empty());
  EXPECT_TRUE(dropped[0].outputs.empty());

  const auto kept = q_how_attr(*p, {{"german", 0}, 0}, "g_out", Direction::Forward);
  ASSERT_EQ(kept.size(), 4u);
  for (const auto& step : kept) {
    for (const auto& h : step.outputs) EXPECT_TRUE(h.attr.has_value());
  }
}

TEST(Q9, CountsUpstreamOperations) {
  auto p = load_pipeline("census.json");
  EXPECT_TRUE(q_all_transformations(*p, "census").empty());
  const auto all = q_all_transformations(*p, "n_out");
  ASSERT_EQ(all.size(), 5u);
  EXPECT_EQ(all.front()->id, "n1");
  EXPECT_EQ(all.back()->id, "n5");

  auto j = load_pipeline("census_join.json");
  EXPECT_EQ(q_all_transformations(*j, "enriched").size(), 2u);
  EXPECT_EQ(q_all_transformations(*j, "final").size(), 5u);
}

TEST(Q10, ExampleJoin) {
  auto p = example_join();
  EXPECT_EQ(rows(q_co_contributory(*p, {"dl", 1}, "dr")), (std::vector<RowIndex>{0}));
  EXPECT_EQ(rows(q_co_contributory(*p, {"dl", 3}, "dr")), (std::vector<RowIndex>{1}));
  EXPECT_TRUE(q_co_contributory(*p, {"dl", 0}, "dr").empty());
}

TEST(Q10, ThroughUpstreamOperations) {
  auto p = load_pipeline("census_join.json");
  const auto occupations = p->dataset("occupations");
  const auto people = p->dataset("people");
  const auto occ_p = people->schema().position_of("occupation");
  const auto occ_o = occupations->schema().position_of("occupation");
  for (RowIndex r = 0; r < 40; ++r) {
    std::vector<RowIndex> expected;
    for (RowIndex o = 0; o < occupations->row_count(); ++o) {
      const Cell& a = people->cell(r, occ_p);
      if (!a.is_null() && a == occupations->cell(o, occ_o)) expected.push_back(o);
    }
    EXPECT_EQ(rows(q_co_contributory(*p, {"people", r}, "occupations")), expected) << "row " << r;
  }
}

TEST(Q11, FanoutMatchesBruteForce) {
  auto p = load_pipeline("fanout.json", {.materialize_all = true});
  const auto values = oracle::propagate(*p);
  const auto& d2 = values.at("d2");
  const auto& d3 = values.at("d3");
  for (RowIndex r = 0; r < d2.rows.size(); ++r) {
    const auto anc = oracle::rows_of(d2.tags[r], "d1");
    std::vector<RowIndex> expected;
    for (RowIndex k = 0; k < d3.rows.size(); ++k) {
      for (auto a : oracle::rows_of(d3.tags[k], "d1")) {
        if (std::binary_search(anc.begin(), anc.end(), a)) {
          expected.push_back(k);
          break;
        }
      }
    }
    EXPECT_EQ(rows(q_co_dependency(*p, {"d2", r}, "d1", "d3")), expected) << "row " << r;
  }
}

TEST(Q11, SameDatasetIsReflexive) {
  auto p = load_pipeline("fanout.json");
  EXPECT_EQ(rows(q_co_dependency(*p, {"d2", 1}, "d1", "d2")), (std::vector<RowIndex>{1}));
}

TEST(WholeDatasetMapping, MatchesPerRowForward) {
  for (const char* spec : kFixtureSpecs) {
    auto p = load_pipeline(spec);
    for (const auto& [s, d] : path_pairs(*p)) {
      const ProvTensor t = whole_dataset_mapping(*p, s, d);
      ASSERT_EQ(t.order(), 2u);
      const auto n = p->row_count(s);
      for (RowIndex r = 0; r < n; r += std::max<RowIndex>(1, n / 25)) {
        const RowIndex seed[] = {r};
        EXPECT_EQ(project(slice(t, 1, seed), 0), rows(q_forward_records(*p, {s, r}, d)))
            << spec << ": " << s << " -> " << d << " row " << r;
      }
    }
  }
}

TEST(WholeDatasetMapping, FilterChainIsMasking) {
  auto p = load_pipeline("compas.json");
  const ProvTensor t = whole_dataset_mapping(*p, "c_sel", "c_f3");
  EXPECT_EQ(t.nnz(), p->row_count("c_f3"));
  EXPECT_EQ(t.index_size(0), p->row_count("c_f3"));
}

TEST(Duality, ForwardAndBackwardAgreeOnFixtures) {
  for (const char* spec : kFixtureSpecs) {
    auto p = load_pipeline(spec);
    for (const auto& [s, d] : path_pairs(*p)) {
      std::set<std::pair<RowIndex, RowIndex>> fwd, bwd;
      for (RowIndex r = 0; r < p->row_count(s); ++r) {
        for (auto o : rows(q_forward_records(*p, {s, r}, d))) fwd.emplace(r, o);
      }
      for (RowIndex o = 0; o < p->row_count(d); ++o) {
        for (auto r : rows(q_backward_records(*p, {d, o}, s))) bwd.emplace(r, o);
      }
      EXPECT_EQ(fwd, bwd) << spec << ": " << s << " -> " << d;
    }
  }
}

TEST(AttributeQueries, RefineRecordQueries) {
  auto p = load_pipeline("census_join.json");
  for (RowIndex r = 0; r < 30; ++r) {
    const auto rec = rows(q_forward_records(*p, {"people", r}, "final"));
    for (std::size_t a = 0; a < p->schema("people").size(); ++a) {
      for (const auto& c : q_forward_attr(*p, {{"people", r}, a}, "final")) {
        EXPECT_TRUE(std::binary_search(rec.begin(), rec.end(), c.record.row));
      }
    }
  }
}

TEST(SetSemantics, BackwardReportsClassMinima) {
  auto p = load_pipeline("dup_join.json", {.materialize_all = true});
  const auto out = p->dataset("dup_out");
  const auto left = p->dataset("dup_left");
  const auto out_cls = oracle::brute_force_classes(*out);
  const auto left_cls = oracle::brute_force_classes(*left);
  QueryOptions set{.set_semantics = true};
  for (RowIndex o = 0; o < out->row_count(); ++o) {
    std::set<RowIndex> expected;
    for (RowIndex o2 = 0; o2 < out->row_count(); ++o2) {
      if (out_cls[o2] != out_cls[o]) continue;
      for (auto r : rows(q_backward_records(*p, {"dup_out", o2}, "dup_left"))) expected.insert(left_cls[r]);
    }
    const auto got = rows(q_backward_records(*p, {"dup_out", o}, "dup_left", set));
    EXPECT_EQ(got, std::vector<RowIndex>(expected.begin(), expected.end())) << "row " << o;
  }
}

TEST(SetSemantics, ForwardReportsClassMinima) {
  auto p = load_pipeline("dup_join.json", {.materialize_all = true});
  const auto out_cls = oracle::brute_force_classes(*p->dataset("dup_out"));
  const auto left_cls = oracle::brute_force_classes(*p->dataset("dup_left"));
  QueryOptions set{.set_semantics = true};
  for (RowIndex r = 0; r < p->row_count("dup_left"); ++r) {
    std::set<RowIndex> expected;
    for (RowIndex r2 = 0; r2 < left_cls.size(); ++r2) {
      if (left_cls[r2] != left_cls[r]) continue;
      for (auto o : rows(q_forward_records(*p, {"dup_left", r2}, "dup_out"))) expected.insert(out_cls[o]);
    }
    const auto got = rows(q_forward_records(*p, {"dup_left", r}, "dup_out", set));
    EXPECT_EQ(got, std::vector<RowIndex>(expected.begin(), expected.end())) << "row " << r;
  }
}

TEST(RunQuery, ResolveAttachesRecords) {
  auto p = example_join();
  QueryRequest req;
  req.type = QueryType::Q2;
  req.dataset = "joinout";
  req.row = 1;
  req.other = "dr";
  req.resolve = true;
  const auto res = run_query(*p, req);
  ASSERT_EQ(res.hits.size(), 1u);
  ASSERT_EQ(res.resolved.size(), 1u);
  EXPECT_GE(res.timing_ms, 0.0);
}

TEST(RunQuery, MissingArgumentsAreErrors) {
  auto p = example_join();
  QueryRequest req;
  req.type = QueryType::Q1;
  req.dataset = "dl";
  EXPECT_THROW(run_query(*p, req), Error);
  req.type = QueryType::Q9;
  req.dataset.clear();
  EXPECT_THROW(run_query(*p, req), Error);
  EXPECT_THROW(parse_query_type("Q12"), Error);
  EXPECT_EQ(parse_query_type("q4"), QueryType::Q4);
}
