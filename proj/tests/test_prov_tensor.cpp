#include <gtest/gtest.h>

#include <random>
#include <set>

#include "common.hpp"
#include "tensprov/error.hpp"
#include "tensprov/json_io.hpp"
#include "tensprov/kernels.hpp"
#include "tensprov/prov_tensor.hpp"

using namespace tensprov;

namespace {

using Tuples = std::vector<std::vector<RowIndex>>;

Tuples tuples(const ProvTensor& t) { return t.leaves().sorted_tuples(); }

ProvTensor example_join() {
  const JoinTriple triples[] = {{0, 1, 0}, {1, 3, 1}};
  return join_tensor("out", 2, "dl", 4, "dr", 2, triples);
}

ProvTensor random_order2(std::mt19937_64& rng, const DatasetId& in, std::size_t n, const DatasetId& out,
                         std::size_t m, double density) {
  std::vector<RowPair> pairs;
  std::bernoulli_distribution coin(density);
  for (std::size_t o = 0; o < m; ++o) {
    for (std::size_t i = 0; i < n; ++i) {
      if (coin(rng)) pairs.push_back({static_cast<RowIndex>(o), static_cast<RowIndex>(i)});
    }
  }
  return augmentation_tensor(in, n, out, m, pairs);
}

// Relation {(o, i)} obtained by brute-force chaining a.b over explicit leaves.
std::set<std::pair<RowIndex, RowIndex>> chain(const ProvTensor& first, const ProvTensor& second) {
  std::set<std::pair<RowIndex, RowIndex>> rel;
  const auto a = first.leaves(), b = second.leaves();
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      if (b.tuple(y)[1] == a.tuple(x)[0]) rel.insert({b.tuple(y)[0], a.tuple(x)[1]});
    }
  }
  return rel;
}

}  // namespace

TEST(Identity, Leaves) {
  EXPECT_EQ(tuples(identity_tensor("i", "o", 3)), (Tuples{{0, 0}, {1, 1}, {2, 2}}));
  EXPECT_TRUE(identity_tensor("i", "o", 0).leaves().empty());
  EXPECT_EQ(nnz(identity_tensor("i", "o", 1000)), 1000u);
}

TEST(Identity, VirtualFormCostsConstant) {
  EXPECT_EQ(memory_bytes(identity_tensor("i", "o", 10)), memory_bytes(identity_tensor("i", "o", 1000000)));
}

TEST(Masking, Construction) {
  const RowIndex kept[] = {1, 3};
  EXPECT_EQ(tuples(masking_tensor("i", "o", 4, kept)), (Tuples{{0, 1}, {1, 3}}));
  EXPECT_TRUE(masking_tensor("i", "o", 4, {}).leaves().empty());
  const RowIndex bad[] = {3, 1};
  EXPECT_THROW(masking_tensor("i", "o", 4, bad), Error);
}

TEST(Masking, LeafCountEqualsKeptRows) {
  std::vector<RowIndex> kept;
  for (RowIndex i = 0; i < 7214; ++i) {
    if (i % 23 != 0 || i >= 307 * 23) kept.push_back(i);
  }
  ASSERT_EQ(kept.size(), 6907u);
  EXPECT_EQ(nnz(masking_tensor("compas", "out", 7214, kept)), 6907u);
}

TEST(Join, ExampleTriples) {
  const ProvTensor t = example_join();
  EXPECT_EQ(t.order(), 3u);
  EXPECT_EQ(tuples(t), (Tuples{{0, 1, 0}, {1, 3, 1}}));
  EXPECT_EQ(nnz(t), 2u);
  EXPECT_EQ(t.dim(0).extent, 2u);
  EXPECT_EQ(t.dim(1).extent, 4u);
  EXPECT_EQ(t.dim(2).extent, 2u);
}

TEST(Join, RejectsRepeatedOutputRow) {
  const JoinTriple triples[] = {{0, 1, 0}, {0, 3, 1}};
  EXPECT_THROW(join_tensor("out", 1, "dl", 4, "dr", 2, triples), Error);
}

TEST(Join, LevelTwoOnlyForParticipants) {
  const ProvTensor t = example_join();
  EXPECT_EQ(t.indexed_rows(1), (RowSet{1, 3}));
  EXPECT_FALSE(t.indexes(1, 0));
  EXPECT_TRUE(t.indexes(2, 1));
}

TEST(Append, ExampleBlocks) {
  const auto [l, r] = append_tensors("out", "dl", "dr", 4, 2);
  EXPECT_EQ(tuples(l), (Tuples{{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
  EXPECT_EQ(tuples(r), (Tuples{{4, 0}, {5, 1}}));
}

TEST(Append, EmptySides) {
  const auto [l0, r0] = append_tensors("out", "dl", "dr", 3, 0);
  EXPECT_TRUE(r0.leaves().empty());
  const auto [l1, r1] = append_tensors("out", "dl", "dr", 0, 3);
  EXPECT_TRUE(l1.leaves().empty());
  EXPECT_EQ(tuples(r1), (Tuples{{0, 0}, {1, 1}, {2, 2}}));
}

TEST(Augmentation, OversampledRow) {
  const RowPair pairs[] = {{0, 0}, {1, 1}, {2, 2}, {3, 2}};
  EXPECT_EQ(tuples(augmentation_tensor("i", 3, "o", 4, pairs)), (Tuples{{0, 0}, {1, 1}, {2, 2}, {3, 2}}));
}

TEST(Augmentation, TwoParentRowAndUnsourcedRow) {
  const RowPair pairs[] = {{0, 0}, {1, 1}, {2, 2}, {3, 0}, {3, 1}};
  const ProvTensor t = augmentation_tensor("i", 3, "o", 5, pairs);
  EXPECT_EQ(project(slice(t, 0, std::vector<RowIndex>{3}), 1), (RowSet{0, 1}));
  EXPECT_FALSE(t.indexes(0, 4));
  EXPECT_TRUE(slice(t, 0, std::vector<RowIndex>{4}).empty());
}

TEST(Augmentation, InvalidIndex) {
  const RowPair pairs[] = {{0, 7}};
  EXPECT_THROW(augmentation_tensor("i", 3, "o", 1, pairs), Error);
}

TEST(Slice, ExampleLeftRow) {
  const auto s = slice(example_join(), 1, std::vector<RowIndex>{1});
  EXPECT_EQ(s.sorted_tuples(), (Tuples{{0, 1, 0}}));
  EXPECT_TRUE(slice(example_join(), 1, {}).empty());
  EXPECT_EQ(slice(example_join(), 0, std::vector<RowIndex>{0, 1}).size(), 2u);
  EXPECT_TRUE(slice(example_join(), 1, std::vector<RowIndex>{0}).empty());
}

TEST(Slice, AccessCountEqualsResult) {
  std::mt19937_64 rng(3);
  const ProvTensor t = random_order2(rng, "i", 60, "o", 50, 0.1);
  for (RowIndex i = 0; i < 60; ++i) {
    AccessCounter c;
    const auto s = slice(t, 1, std::vector<RowIndex>{i}, &c);
    EXPECT_EQ(c.leaf_refs, s.size());
  }
}

TEST(Project, ExampleLeftParticipants) {
  EXPECT_EQ(project(example_join().leaves(), 1), (RowSet{1, 3}));
  EXPECT_TRUE(project(LeafSet{3, {}}, 2).empty());
  EXPECT_EQ(project(identity_tensor("i", "o", 4).leaves(), 0), (RowSet{0, 1, 2, 3}));
}

TEST(Properties, SliceProjectAndDuality) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 20; ++round) {
    const ProvTensor t = random_order2(rng, "i", 30, "o", 25, 0.08);
    for (RowIndex i = 0; i < 30; ++i) {
      const auto fwd = project(slice(t, 1, std::vector<RowIndex>{i}), 0);
      if (t.indexes(1, i)) EXPECT_TRUE(std::ranges::binary_search(project(slice(t, 1, std::vector<RowIndex>{i}), 1), i));
      for (RowIndex o = 0; o < 25; ++o) {
        const auto back = project(slice(t, 0, std::vector<RowIndex>{o}), 1);
        EXPECT_EQ(std::ranges::binary_search(fwd, o), std::ranges::binary_search(back, i));
      }
    }
  }
}

TEST(Compose, IdentityIsNeutral) {
  EXPECT_EQ(tuples(compose(identity_tensor("a", "b", 5), identity_tensor("b", "c", 5))),
            tuples(identity_tensor("a", "c", 5)));
  const RowIndex kept[] = {1, 3};
  const ProvTensor mask = masking_tensor("a", "b", 4, kept);
  EXPECT_EQ(tuples(compose(identity_tensor("a0", "a", 4), mask)), (Tuples{{0, 1}, {1, 3}}));
  EXPECT_EQ(tuples(compose(mask, identity_tensor("b", "c", 2))), (Tuples{{0, 1}, {1, 3}}));
}

TEST(Compose, FilterAfterExampleJoin) {
  const RowIndex kept[] = {0};
  const ProvTensor mask = masking_tensor("out", "f", 2, kept);
  const ProvTensor c = compose(example_join(), mask);
  EXPECT_EQ(c.order(), 3u);
  EXPECT_EQ(c.dim(0).dataset, "f");
  EXPECT_EQ(c.dim(1).dataset, "dl");
  EXPECT_EQ(c.dim(2).dataset, "dr");
  EXPECT_EQ(tuples(c), (Tuples{{0, 1, 0}}));
}

TEST(Compose, MatchesBruteForceAndIsAssociative) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    const ProvTensor a = random_order2(rng, "x", 20, "y", 18, 0.1);
    const ProvTensor b = random_order2(rng, "y", 18, "z", 15, 0.1);
    const ProvTensor c = random_order2(rng, "z", 15, "w", 12, 0.15);
    const ProvTensor ab = compose(a, b);
    std::set<std::pair<RowIndex, RowIndex>> got;
    for (const auto& t : tuples(ab)) got.insert({t[0], t[1]});
    EXPECT_EQ(got, chain(a, b));
    EXPECT_EQ(tuples(compose(ab, c)), tuples(compose(a, compose(b, c))));
  }
}

TEST(Compose, NoSharedDataset) {
  EXPECT_THROW(compose(identity_tensor("a", "b", 2), identity_tensor("c", "d", 2)), Error);
}

TEST(ProjectDims, CollapsesJoinSide) {
  const std::size_t keep[] = {0, 2};
  EXPECT_EQ(tuples(project_dims(example_join(), keep)), (Tuples{{0, 0}, {1, 1}}));
}

TEST(SetSemantics, RewritesToClassMinimum) {
  // output rows 2 and 4 identical
  std::vector<RowIndex> canon{0, 1, 2, 3, 2};
  const DuplicateClasses classes(canon);
  const RowPair pairs[] = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const ProvTensor t = augmentation_tensor("i", 5, "o", 5, pairs);
  const ProvTensor s = to_set_semantics(t, classes);
  EXPECT_EQ(tuples(s), (Tuples{{0, 0}, {1, 1}, {2, 2}, {2, 4}, {3, 3}}));
  EXPECT_EQ(s.index_size(0), 4u);
  EXPECT_EQ(classes.members(4), (std::vector<RowIndex>{2, 4}));
  EXPECT_EQ(classes.expand(std::vector<RowIndex>{4}), (RowSet{2, 4}));
  EXPECT_EQ(classes.canonicalize(std::vector<RowIndex>{4, 3}), (RowSet{2, 3}));
}

TEST(SetSemantics, NoDuplicatesUnchanged) {
  const Dataset dl = testing_support::example_left();
  const ProvTensor t = identity_tensor("x", "dl", 4);
  EXPECT_EQ(tuples(to_set_semantics(t, dl)), tuples(t));
  EXPECT_FALSE(duplicate_classes(dl).has_duplicates());
}

TEST(SetSemantics, AllRowsIdentical) {
  Schema s({{"a", CellType::Integer}});
  const Dataset d("o", s, std::vector<Row>(5, Row{Cell::integer(1)}));
  const RowPair pairs[] = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const ProvTensor t = to_set_semantics(augmentation_tensor("i", 5, "o", 5, pairs), d);
  EXPECT_EQ(t.index_size(0), 1u);
  EXPECT_EQ(project(t.leaves(), 0), (RowSet{0}));
  EXPECT_EQ(duplicate_classes(d).class_count(), 1u);
}

TEST(Memory, LinearInLeaves) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    std::vector<JoinTriple> triples;
    std::uniform_int_distribution<RowIndex> pick(0, static_cast<RowIndex>(n - 1));
    for (std::size_t o = 0; o < n; ++o) triples.push_back({static_cast<RowIndex>(o), pick(rng), pick(rng)});
    const ProvTensor t = join_tensor("o", n, "l", n, "r", n, triples);
    worst = std::max(worst, static_cast<double>(memory_bytes(t)) / static_cast<double>(nnz(t) * t.order()));
  }
  EXPECT_LT(worst, 16.0);
}

TEST(Json, TensorRoundTrip) {
  const ProvTensor t = example_join();
  const ProvTensor back = tensor_from_json(tensor_to_json(t));
  EXPECT_EQ(back.dims(), t.dims());
  EXPECT_EQ(tuples(back), tuples(t));
}

TEST(Kernels, ParallelMatchesSerial) {
  std::mt19937_64 rng(21);
  const ProvTensor a = random_order2(rng, "x", 300, "y", 250, 0.02);
  const ProvTensor b = random_order2(rng, "y", 250, "z", 200, 0.02);
  auto sorted = [](std::vector<RowIndex> flat) {
    std::set<std::pair<RowIndex, RowIndex>> s;
    for (std::size_t k = 0; k + 1 < flat.size(); k += 2) s.insert({flat[k], flat[k + 1]});
    return s;
  };
  EXPECT_EQ(sorted(kernels::compose_leaves(a, b, 1)), sorted(kernels::compose_leaves_serial(a, b, 1)));
  EXPECT_EQ(kernels::forward_all(a, 1, 0, 300), kernels::forward_all_serial(a, 1, 0, 300));
  const Dataset d = testing_support::example_left();
  EXPECT_EQ(kernels::hash_rows(d), kernels::hash_rows_serial(d));
}
