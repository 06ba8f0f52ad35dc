#include <doctest.h>

#include <algorithm>
#include <random>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "rulekit/dataset.hpp"
#include "rulekit/error.hpp"
#include "rulekit/synthetic.hpp"
#include "rulekit/table.hpp"

using namespace rulekit;

namespace {

Table parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

ColumnSchema label_schema(std::string label, std::optional<std::string> positive = std::nullopt) {
  ColumnSchema s;
  s.label_column = std::move(label);
  s.positive_label = std::move(positive);
  return s;
}

}  // namespace

TEST_CASE("csv reader handles quotes, escaped quotes and CRLF") {
  Table t = parse("a,b,c\r\n1,\"x,y\",\"say \"\"hi\"\"\"\r\n2,\"multi\nline\",z\r\n");
  REQUIRE(t.column_count() == 3);
  REQUIRE(t.row_count() == 2);
  CHECK(t.rows[0][1] == "x,y");
  CHECK(t.rows[0][2] == "say \"hi\"");
  CHECK(t.rows[1][1] == "multi\nline");
  CHECK(t.rows[1][2] == "z");

  std::ostringstream out;
  write_csv(out, t);
  Table back = parse(out.str());
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
}

TEST_CASE("csv reader rejects ragged rows and unterminated quotes") {
  CHECK_THROWS_AS(parse("a,b\n1,2,3\n"), DataError);
  CHECK_THROWS_AS(parse("a,b\n1,\"open\n"), DataError);
}

TEST_CASE("categorical column with three categories gives six features") {
  Table t = parse("color,y\nred,1\ngreen,0\nblue,1\nred,0\n");
  ColumnSchema s = label_schema("y");
  s.kinds["color"] = ColumnKind::categorical;
  auto r = binarize(t, s);
  CHECK(r.data.feature_count() == 6);
  CHECK(r.data.sample_count() == 4);
  std::size_t eq = 0, neq = 0;
  for (const auto& d : r.data.descriptors()) {
    eq += d.kind == FeatureKind::categorical_eq;
    neq += d.kind == FeatureKind::categorical_neq;
  }
  CHECK(eq == 3);
  CHECK(neq == 3);
  auto j = r.data.find_feature("color = red");
  REQUIRE(j);
  CHECK(r.data.column(*j).count() == 2);
  CHECK(r.data.labels().count() == 2);
}

TEST_CASE("numeric column with distinct deciles gives eighteen features") {
  std::string text = "v,y\n";
  for (int i = 1; i <= 100; ++i) text += std::to_string(i) + "," + std::to_string(i % 2) + "\n";
  ColumnSchema s = label_schema("y");
  s.kinds["v"] = ColumnKind::numeric;
  auto r = binarize(parse(text), s);
  CHECK(r.data.feature_count() == 18);
  // index ceil(q n) - 1 on 1..100 gives 10, 20, ..., 90
  auto b = decile_boundaries([] {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    return v;
  }());
  REQUIRE(b.size() == 9);
  for (int k = 0; k < 9; ++k) CHECK(b[k] == doctest::Approx(10.0 * (k + 1)));
  CHECK(r.data.find_feature("v <= 10"));
  CHECK(r.data.find_feature("v > 90"));
}

TEST_CASE("decile boundaries are deduplicated") {
  auto b = decile_boundaries({1, 1, 1, 1, 1, 1, 1, 1, 2, 2});
  CHECK(b == std::vector<double>{1, 2});
  CHECK(decile_boundaries({5}).size() == 1);
}

TEST_CASE("numeric threshold pairs are complementary") {
  Table t = transfusion_like_table();
  auto r = binarize(t, transfusion_like_schema());
  const auto& data = r.data;
  std::size_t pairs = 0;
  for (FeatureIndex j = 0; j + 1 < data.feature_count(); ++j) {
    const auto& a = data.descriptor(j);
    const auto& b = data.descriptor(j + 1);
    if (a.kind != FeatureKind::numeric_le) continue;
    REQUIRE(b.kind == FeatureKind::numeric_gt);
    CHECK(std::get<double>(a.operand) == std::get<double>(b.operand));
    CHECK(data.column(j) == ~data.column(j + 1));
    ++pairs;
  }
  CHECK(pairs * 2 == data.feature_count());
}

TEST_CASE("tic-tac-toe binarizes to 54 features over 958 boards") {
  Table t = tic_tac_toe_table();
  CHECK(t.row_count() == 958);
  auto r = binarize(t, tic_tac_toe_schema());
  CHECK(r.data.feature_count() == 54);
  CHECK(r.data.sample_count() == 958);
  CHECK(r.data.labels().count() == 626);
  CHECK(r.data.negatives().count() == 332);
}

TEST_CASE("exclusions are bitwise complements and counts add to n") {
  BinaryDataset data = random_unstructured_dataset(137, 40, 11);
  for (FeatureIndex j = 0; j < data.feature_count(); ++j) {
    CHECK(data.exclusion(j) == ~data.column(j));
    CHECK(data.column(j).count() + data.exclusion(j).count() == data.sample_count());
  }
  CHECK(data.positives().count() + data.negatives().count() == data.sample_count());
}

TEST_CASE("constant columns are skipped with a warning") {
  Table t = parse("k,c,y\nsame,a,1\nsame,b,0\nsame,a,0\n");
  ColumnSchema s = label_schema("y");
  s.kinds["k"] = ColumnKind::categorical;
  s.kinds["c"] = ColumnKind::categorical;
  auto r = binarize(t, s);
  CHECK(r.data.feature_count() == 4);
  REQUIRE(!r.warnings.empty());
  CHECK(r.warnings.front().find("'k'") != std::string::npos);
}

TEST_CASE("identical binarized columns are kept and flagged") {
  Table t = parse("a,b,y\n1,1,1\n0,0,0\n1,1,0\n");
  auto r = binarize(t, label_schema("y"));
  CHECK(r.data.feature_count() == 4);
  bool flagged = std::any_of(r.warnings.begin(), r.warnings.end(),
                             [](const std::string& w) { return w.find("identical") != std::string::npos; });
  CHECK(flagged);
}

TEST_CASE("binarize errors") {
  SUBCASE("missing value") {
    Table t = parse("a,y\nx,1\n?,0\n");
    CHECK_THROWS_AS(binarize(t, label_schema("y")), DataError);
  }
  SUBCASE("empty table") {
    Table t = parse("a,y\n");
    CHECK_THROWS_AS(binarize(t, label_schema("y")), DataError);
  }
  SUBCASE("label with three values") {
    Table t = parse("a,y\nx,p\nz,q\nx,r\n");
    CHECK_THROWS_AS(binarize(t, label_schema("y")), DataError);
  }
  SUBCASE("non-numeric cell in numeric column") {
    Table t = parse("a,y\n1,1\nfoo,0\n");
    ColumnSchema s = label_schema("y");
    s.kinds["a"] = ColumnKind::numeric;
    CHECK_THROWS_AS(binarize(t, s), DataError);
  }
  SUBCASE("unknown label column") {
    Table t = parse("a,y\n1,1\n0,0\n");
    CHECK_THROWS(binarize(t, label_schema("nope")));
  }
}

TEST_CASE("positive label maps string labels") {
  Table t = parse("a,y\nx,yes\nz,no\nx,no\n");
  auto r = binarize(t, label_schema("y", "yes"));
  CHECK(r.data.labels().count() == 1);
  CHECK(r.data.label(0));
}

TEST_CASE("raw binary columns get the feature and its complement") {
  Table t = parse("b,y\n1,1\n0,0\n1,0\n");
  auto r = binarize(t, label_schema("y"));
  REQUIRE(r.data.feature_count() == 2);
  CHECK(r.data.descriptor(0).kind == FeatureKind::raw_binary);
  CHECK(r.data.column(0).count() == 2);
  CHECK(r.data.column(1) == ~r.data.column(0));
}

TEST_CASE("binarization is deterministic and encode reproduces it") {
  Table t = tic_tac_toe_table();
  auto a = binarize(t, tic_tac_toe_schema());
  auto b = binarize(t, tic_tac_toe_schema());
  REQUIRE(a.data.feature_count() == b.data.feature_count());
  for (FeatureIndex j = 0; j < a.data.feature_count(); ++j) {
    CHECK(a.data.descriptor(j) == b.data.descriptor(j));
    CHECK(a.data.column(j) == b.data.column(j));
  }
  // encode against a table with shuffled column order
  Table shuffled;
  std::vector<std::size_t> perm(t.column_count());
  for (std::size_t c = 0; c < perm.size(); ++c) perm[c] = perm.size() - 1 - c;
  for (auto c : perm) shuffled.header.push_back(t.header[c]);
  for (const auto& row : t.rows) {
    std::vector<std::string> r;
    for (auto c : perm) r.push_back(row[c]);
    shuffled.rows.push_back(std::move(r));
  }
  BinaryDataset e = encode(shuffled, a.data.descriptors(), tic_tac_toe_schema());
  REQUIRE(e.feature_count() == a.data.feature_count());
  for (FeatureIndex j = 0; j < e.feature_count(); ++j) {
    CHECK(e.column(j) == a.data.column(j));
    CHECK(e.descriptor(j).name == a.data.descriptor(j).name);
  }
  CHECK(e.labels() == a.data.labels());
}

TEST_CASE("cover and subset") {
  std::vector<std::vector<std::uint8_t>> rows = {{1, 1, 0}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  auto data = BinaryDataset::from_rows(rows, {1, 0, 1, 0});
  CHECK(data.cover(std::vector<FeatureIndex>{}).count() == 4);
  auto c = data.cover(std::vector<FeatureIndex>{0, 1});
  CHECK(c.indices() == std::vector<std::size_t>{0, 2});
  std::vector<std::size_t> pick{3, 0};
  auto sub = data.subset(pick);
  CHECK(sub.sample_count() == 2);
  CHECK(sub.row(0) == rows[3]);
  CHECK(sub.label(1));
  CHECK(sub.exclusion(0) == ~sub.column(0));
}

TEST_CASE("schema file loading") {
  auto dir = std::filesystem::temp_directory_path() / "rulekit_schema_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "s.json";
  {
    std::ofstream f(path);
    f << R"({"label": "class", "positive": "p", "columns": {"a": "categorical", "b": "numeric", "c": "ignore"}})";
  }
  ColumnSchema s = load_schema(path);
  CHECK(s.label_column == "class");
  CHECK(s.positive_label == std::optional<std::string>("p"));
  CHECK(s.kinds.at("b") == ColumnKind::numeric);
  CHECK(s.kinds.at("c") == ColumnKind::ignore);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK_THROWS_AS(load_schema(path), DataError);
  CHECK_THROWS_AS(load_schema(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}
