/*
 * Copyright 2026 The xdata Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "xdata/arff.hpp"

namespace fs = std::filesystem;
using namespace xdata::arff;

namespace {

const fs::path kFixtures = fs::path(XDATA_FIXTURE_DIR) / "arff";

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(ArffParse, NumericAndNominalWithMissing) {
  const Relation rel = parse("@relation t\n@attribute a numeric\n@attribute c {x,y}\n@data\n1.5,x\n?,y\n");
  EXPECT_EQ(rel.name, "t");
  ASSERT_EQ(rel.num_attributes(), 2u);
  EXPECT_TRUE(rel.attributes[0].is_numeric());
  EXPECT_EQ(rel.attributes[1].categories(), (std::vector<std::string>{"x", "y"}));
  ASSERT_EQ(rel.num_rows(), 2u);
  EXPECT_EQ(rel.rows[0][0], Value(1.5));
  EXPECT_EQ(rel.rows[0][1], Value(Nom{0}));
  EXPECT_TRUE(is_missing(rel.rows[1][0]));
  EXPECT_EQ(rel.rows[1][1], Value(Nom{1}));
}

TEST(ArffParse, EmptyDataSection) {
  const Relation rel = parse("@relation t\n@attribute a numeric\n@data\n");
  EXPECT_EQ(rel.num_attributes(), 1u);
  EXPECT_EQ(rel.num_rows(), 0u);
}

TEST(ArffParse, ArityErrorReportsLine) {
  try {
    parse("@relation t\n@attribute a numeric\n@data\n1,2\n");
    FAIL() << "expected an arity error";
  } catch (const ArffError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Arity);
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(ArffParse, TypeAliasesAndKeywordCase) {
  const Relation rel = parse("@RELATION r\n@Attribute a INTEGER\n@attribute b Real\n@ATTRIBUTE c string\n@DATA\n1,2,x\n");
  EXPECT_TRUE(rel.attributes[0].is_numeric());
  EXPECT_TRUE(rel.attributes[1].is_numeric());
  EXPECT_TRUE(rel.attributes[2].is_string());
}

TEST(ArffParse, QuotedNamesAndValuesKeepCommasAndSpaces) {
  const Relation rel = parse(
      "@relation 'my rel'\n@attribute 'a b' numeric\n@attribute m {'very happy','x, y'}\n@data\n1,'x, y'\n");
  EXPECT_EQ(rel.name, "my rel");
  EXPECT_EQ(rel.attributes[0].name, "a b");
  EXPECT_EQ(rel.attributes[1].categories()[1], "x, y");
  EXPECT_EQ(rel.rows[0][1], Value(Nom{1}));
}

TEST(ArffParse, NominalMatchingIsCaseSensitive) {
  EXPECT_THROW(parse("@relation t\n@attribute c {Happy,sad}\n@data\nhappy\n"), ArffError);
}

TEST(ArffParse, QuotedQuestionMarkIsAValue) {
  const Relation rel = parse("@relation t\n@attribute s string\n@data\n'?'\n?\n");
  EXPECT_EQ(rel.rows[0][0], Value(Str{"?"}));
  EXPECT_TRUE(is_missing(rel.rows[1][0]));
}

TEST(ArffParse, RejectsNonFiniteNumbers) {
  EXPECT_THROW(parse("@relation t\n@attribute a numeric\n@data\nnan\n"), ArffError);
  EXPECT_THROW(parse("@relation t\n@attribute a numeric\n@data\n1e999\n"), ArffError);
}

TEST(ArffParse, DateAndSparseAreUnsupported) {
  try {
    parse("@relation t\n@attribute d date\n@data\n");
    FAIL();
  } catch (const ArffError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
  }
  try {
    parse("@relation t\n@attribute a numeric\n@data\n{0 1}\n");
    FAIL();
  } catch (const ArffError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
  }
}

TEST(ArffWrite, QuotesCategoriesWithWhitespace) {
  Relation rel{"t", {{"mood", Nominal{{"very happy", "sad"}}}}, {{Nom{0}}, {Nom{1}}}};
  const std::string text = to_string(rel);
  EXPECT_NE(text.find("{'very happy',sad}"), std::string::npos);
  EXPECT_NE(text.find("\n'very happy'\n"), std::string::npos);
  EXPECT_EQ(parse(text), rel);
}

TEST(ArffWrite, NumbersRoundTripBitExactly) {
  Relation rel{"t", {{"v", Numeric{}}}, {{0.1}, {1.0 / 3.0}, {-0.0}, {5e-324}, {1.7976931348623157e308}}};
  const Relation back = parse(to_string(rel));
  ASSERT_EQ(back.num_rows(), rel.num_rows());
  for (std::size_t i = 0; i < rel.num_rows(); ++i) {
    EXPECT_TRUE(bit_equal(std::get<double>(back.rows[i][0]), std::get<double>(rel.rows[i][0]))) << i;
  }
}

TEST(ArffWrite, MissingWrittenAsQuestionMark) {
  Relation rel{"t", {{"a", Numeric{}}, {"b", Nominal{{"x"}}}}, {{Missing{}, Missing{}}}};
  EXPECT_NE(to_string(rel).find("\n?,?\n"), std::string::npos);
}

TEST(ArffFixtures, ValidCorpusRoundTrips) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(kFixtures / "valid")) {
    SCOPED_TRACE(entry.path().filename().string());
    const Relation first = read_file(entry.path().string());
    EXPECT_NO_THROW(validate(first));
    const Relation second = parse(to_string(first));
    EXPECT_EQ(second, first);
    EXPECT_EQ(to_string(second), to_string(first));
    EXPECT_EQ(count_missing(second), count_missing(first));
    ++count;
  }
  EXPECT_GE(count, 10u);
}

TEST(ArffFixtures, CrlfAndEscapes) {
  const Relation crlf = read_file((kFixtures / "valid" / "crlf.arff").string());
  EXPECT_EQ(crlf.num_rows(), 3u);
  EXPECT_EQ(crlf.attributes[1].categories(), (std::vector<std::string>{"a", "b"}));
  const Relation esc = read_file((kFixtures / "valid" / "escapes.arff").string());
  EXPECT_EQ(esc.attributes[0].categories()[0], "it's");
  EXPECT_EQ(esc.attributes[0].categories()[1], "back\\slash");
  EXPECT_EQ(esc.rows[0][1], Value(Str{"say \"hi\""}));
  EXPECT_EQ(esc.rows[2][1], Value(Str{"double quoted"}));
}

TEST(ArffFixtures, MalformedFilesReportLine) {
  const std::vector<std::pair<std::string, std::size_t>> cases{
      {"arity.arff", 4},         {"bad_number.arff", 5},         {"undeclared_nominal.arff", 5},
      {"unknown_type.arff", 2},  {"date.arff", 2},               {"sparse.arff", 5},
      {"unterminated_quote.arff", 4}, {"duplicate_category.arff", 2}, {"no_data.arff", 3},
      {"attribute_before_relation.arff", 2}, {"infinite.arff", 4}, {"short_row.arff", 7},
  };
  for (const auto& [name, line] : cases) {
    SCOPED_TRACE(name);
    try {
      read_file((kFixtures / "invalid" / name).string());
      ADD_FAILURE() << "parsed without error";
    } catch (const ArffError& e) {
      EXPECT_EQ(e.line(), line);
      EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos);
    }
  }
}

// Property: parse(write(r)) == r for randomly generated valid relations.
TEST(ArffProperty, RandomRelationsRoundTrip) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> alphabet{"a", "B", " ", ",", "'", "\"", "%", "?", "{", "}", "\\", "x y", "é"};
  auto random_text = [&](bool allow_empty) {
    std::string s;
    const int len = static_cast<int>(rng() % 5) + (allow_empty ? 0 : 1);
    for (int i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  for (int trial = 0; trial < 300; ++trial) {
    Relation rel;
    rel.name = random_text(false);
    const int n_attr = 1 + static_cast<int>(rng() % 5);
    for (int j = 0; j < n_attr; ++j) {
      const std::string name = random_text(false) + std::to_string(j);
      switch (rng() % 3) {
        case 0: rel.attributes.push_back({name, Numeric{}}); break;
        case 1: {
          std::vector<std::string> cats;
          const int k = 1 + static_cast<int>(rng() % 4);
          for (int c = 0; c < k; ++c) cats.push_back(random_text(true) + "#" + std::to_string(c));
          rel.attributes.push_back({name, Nominal{cats}});
          break;
        }
        default: rel.attributes.push_back({name, StringAttr{}});
      }
    }
    const int n_rows = static_cast<int>(rng() % 6);
    for (int i = 0; i < n_rows; ++i) {
      std::vector<Value> row;
      for (const auto& attr : rel.attributes) {
        if (rng() % 4 == 0) {
          row.push_back(Missing{});
        } else if (attr.is_numeric()) {
          double v = 0.0;
          do {
            std::uint64_t bits = rng();
            std::memcpy(&v, &bits, sizeof v);
          } while (!std::isfinite(v));
          row.push_back(v);
        } else if (attr.is_nominal()) {
          row.push_back(Nom{rng() % attr.categories().size()});
        } else {
          row.push_back(Str{random_text(true)});
        }
      }
      rel.rows.push_back(std::move(row));
    }
    ASSERT_NO_THROW(validate(rel));
    const Relation back = parse(to_string(rel));
    ASSERT_EQ(back.attributes, rel.attributes) << to_string(rel);
    ASSERT_EQ(back.num_rows(), rel.num_rows());
    for (std::size_t i = 0; i < rel.num_rows(); ++i) {
      for (std::size_t j = 0; j < rel.num_attributes(); ++j) {
        const auto* a = std::get_if<double>(&rel.rows[i][j]);
        if (a) {
          ASSERT_TRUE(bit_equal(*a, std::get<double>(back.rows[i][j])));
        } else {
          ASSERT_EQ(back.rows[i][j], rel.rows[i][j]);
        }
      }
    }
    EXPECT_EQ(count_missing(back), count_missing(rel));
  }
}

// Property: arbitrary byte soup either parses into a valid relation or
// fails with a located ArffError.
TEST(ArffProperty, ParserIsTotal) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces{"@relation r\n", "@attribute a numeric\n", "@attribute c {x,y}\n",
                                        "@data\n", "1,x\n", "?,?\n", "'", ",", "\r\n", "%c\n", "{", "}", "x", " "};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) text += pieces[rng() % pieces.size()];
    try {
      const Relation rel = parse(text);
      EXPECT_NO_THROW(validate(rel)) << text;
    } catch (const ArffError& e) {
      EXPECT_GE(e.line(), 0u);
    }
  }
}
