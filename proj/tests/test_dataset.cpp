#include <gtest/gtest.h>

#include "common.hpp"
#include "tensprov/csv.hpp"
#include "tensprov/dataset.hpp"
#include "tensprov/error.hpp"

using namespace tensprov;
using testing_support::example_left;
using testing_support::example_right;

TEST(Cell, NullEqualsNull) {
  EXPECT_EQ(Cell::null(), Cell::null());
  EXPECT_NE(Cell::null(), Cell::integer(0));
  EXPECT_NE(Cell::integer(1), Cell::real(1.0));
}

TEST(Cell, SortPutsNullsLast) {
  std::vector<Cell> v{Cell::null(), Cell::integer(3), Cell::null(), Cell::integer(-1)};
  std::sort(v.begin(), v.end(), cell_less);
  EXPECT_EQ(v[0], Cell::integer(-1));
  EXPECT_EQ(v[1], Cell::integer(3));
  EXPECT_TRUE(v[2].is_null());
  EXPECT_TRUE(v[3].is_null());
}

TEST(Schema, PositionLookup) {
  Schema s({{"a", CellType::Integer}, {"b", CellType::Text}});
  EXPECT_EQ(s.position_of("b"), 1u);
  EXPECT_FALSE(s.find("c").has_value());
  EXPECT_THROW(s.position_of("c"), Error);
}

TEST(Dataset, RejectsRaggedRowsAndWrongTypes) {
  Schema s({{"a", CellType::Integer}, {"b", CellType::Text}});
  EXPECT_THROW(Dataset("d", s, {{Cell::integer(1)}}), Error);
  EXPECT_THROW(Dataset("d", s, {{Cell::text("x"), Cell::text("y")}}), Error);
  EXPECT_NO_THROW(Dataset("d", s, {{Cell::null(), Cell::null()}}));
}

TEST(Dataset, ExampleLeftRowOne) {
  const Dataset dl = example_left();
  ASSERT_EQ(dl.row_count(), 4u);
  const auto row = get_row(dl, 1);
  EXPECT_EQ(row[0], Cell::integer(20));
  EXPECT_EQ(row[1], Cell::text("1994-03-08"));
  EXPECT_EQ(row[2], Cell::text("M"));
  EXPECT_TRUE(dl.cell(2, 1).is_null());
}

TEST(Dataset, ExampleRightRowZero) {
  const Dataset dr = example_right();
  const auto row = get_row(dr, 0);
  EXPECT_EQ(row[0], Cell::integer(20));
  EXPECT_EQ(row[1], Cell::text("Alice"));
}

TEST(Dataset, RowIndexOutOfRange) {
  const Dataset dl = example_left();
  try {
    get_row(dl, dl.row_count());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
}

TEST(Dataset, RowEqual) {
  Schema s({{"a", CellType::Integer}, {"b", CellType::Text}});
  Dataset d("d", s,
            {{Cell::integer(1), Cell::null()},
             {Cell::integer(1), Cell::null()},
             {Cell::integer(1), Cell::text("x")},
             {Cell::integer(1), Cell::text("x")}});
  EXPECT_TRUE(row_equal(d, 0, 1));
  EXPECT_FALSE(row_equal(d, 1, 2));
  EXPECT_TRUE(row_equal(d, 2, 3));
  EXPECT_TRUE(row_equal(d, 3, 3));
  EXPECT_THROW(row_equal(d, 0, 4), Error);
}

TEST(Csv, InfersTypes) {
  const Dataset d = parse_csv("a,b\n1,x\n2,y\n", "t");
  ASSERT_EQ(d.row_count(), 2u);
  EXPECT_EQ(d.schema(), Schema({{"a", CellType::Integer}, {"b", CellType::Text}}));
}

TEST(Csv, HeaderOnly) {
  const Dataset d = parse_csv("a,b\n", "t");
  EXPECT_EQ(d.row_count(), 0u);
  EXPECT_EQ(d.attr_count(), 2u);
}

TEST(Csv, EmptyFieldIsNull) {
  const Dataset d = parse_csv("a,b\n1,\n,2\n", "t");
  EXPECT_EQ(d.schema()[1].type, CellType::Integer);
  EXPECT_TRUE(d.cell(0, 1).is_null());
  EXPECT_TRUE(d.cell(1, 0).is_null());
  EXPECT_EQ(d.cell(1, 1), Cell::integer(2));
}

TEST(Csv, IntegerRealTextFallback) {
  const Dataset d = parse_csv("a,b,c\n1,1.5,x\n2,2,3\n", "t");
  EXPECT_EQ(d.schema()[0].type, CellType::Integer);
  EXPECT_EQ(d.schema()[1].type, CellType::Real);
  EXPECT_EQ(d.schema()[2].type, CellType::Text);
  EXPECT_EQ(d.cell(1, 2), Cell::text("3"));
}

TEST(Csv, QuotedFields) {
  const Dataset d = parse_csv("a,b\n\"x, y\",\"say \"\"hi\"\"\"\n", "t");
  EXPECT_EQ(d.cell(0, 0), Cell::text("x, y"));
  EXPECT_EQ(d.cell(0, 1), Cell::text("say \"hi\""));
}

TEST(Csv, RaggedRowNamesLine) {
  try {
    parse_csv("a,b\n1,2\n3\n", "t");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(Csv, TypeHints) {
  CsvOptions o;
  o.type_hints["a"] = CellType::Real;
  const Dataset d = parse_csv("a\n1\n", "t", o);
  EXPECT_EQ(d.cell(0, 0), Cell::real(1.0));
}

TEST(Csv, MissingFileIsIoError) {
  try {
    load_csv("/nonexistent/file.csv", "t");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Csv, RoundTripIsValueIdempotent) {
  const Dataset dl = example_left();
  const Dataset again = parse_csv(write_csv(dl), "dl");
  EXPECT_EQ(again.schema(), dl.schema());
  EXPECT_EQ(again.rows(), dl.rows());
}
