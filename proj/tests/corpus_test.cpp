#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_util.hpp"
#include "ttedepth/corpus.hpp"

namespace ttedepth {
namespace {

using testing::fixture;

double norm_of(std::span<const double> v) { return std::sqrt(dot(v, v)); }

TEST(NormalizeTest, ThreeFourFive) {
  const auto v = normalize(std::vector<double>{3.0, 4.0});
  EXPECT_DOUBLE_EQ(v[0], 0.6);
  EXPECT_DOUBLE_EQ(v[1], 0.8);
}

TEST(NormalizeTest, UnitAndSign) {
  EXPECT_EQ(normalize(std::vector<double>{1.0, 0.0, 0.0}),
            (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(normalize(std::vector<double>{-2.0, 0.0}),
            (std::vector<double>{-1.0, 0.0}));
}

TEST(NormalizeTest, RejectsZeroAndNonFinite) {
  EXPECT_THROW(normalize(std::vector<double>{0.0, 0.0}), Error);
  EXPECT_THROW(normalize(std::vector<double>{NAN, 1.0}), Error);
  EXPECT_THROW(normalize(std::vector<double>{INFINITY, 1.0}), Error);
}

TEST(NormalizeTest, HugeAndTinyInputsDoNotOverflow) {
  const auto big = normalize(std::vector<double>{1e300, 1e300});
  EXPECT_NEAR(norm_of(big), 1.0, 1e-12);
  const auto tiny = normalize(std::vector<double>{1e-310, 0.0});
  EXPECT_EQ(tiny[0], 1.0);
}

TEST(NormalizeTest, PowerOfTwoScalingIsBitwiseInvariant) {
  const auto records = testing::random_records(200, 7, 3);
  for (const auto& r : records) {
    const auto base = normalize(r.vector);
    for (double scale : {0.125, 4.0, 1024.0}) {
      std::vector<double> scaled = r.vector;
      for (double& v : scaled) v *= scale;
      EXPECT_EQ(normalize(scaled), base);
    }
  }
}

TEST(NormalizeTest, NormWithinTolerance) {
  for (const auto& r : testing::random_records(500, 33, 11)) {
    EXPECT_LE(std::fabs(norm_of(normalize(r.vector)) - 1.0), 1e-12);
  }
}

TEST(LoadCorpusTest, JsonlNormalizesAndKeepsOrder) {
  const auto c = load_corpus(fixture("with_meta.jsonl"), CorpusFormat::kJsonl);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.dim(), 2u);
  EXPECT_EQ(c.name(), "with_meta");
  EXPECT_EQ(c[0].id, "r1");
  EXPECT_DOUBLE_EQ(c[0].vector[0], 0.6);
  EXPECT_DOUBLE_EQ(c[0].vector[1], 0.8);
  EXPECT_EQ(c[0].label, "pos");
  EXPECT_FALSE(c[1].label.has_value());
  EXPECT_EQ(c[1].text, "hello");
  ASSERT_EQ(c.metadata().size(), 1u);
}

TEST(LoadCorpusTest, CsvFixture) {
  const auto c = load_corpus(fixture("two_labels.csv"), CorpusFormat::kCsv);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.dim(), 2u);
  EXPECT_EQ(c[0].id, "a");
  EXPECT_EQ(c[0].label, "X");
  EXPECT_EQ(c[1].label, "Y");
  EXPECT_EQ(c[0].vector, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(c[1].vector, (std::vector<double>{0.0, 1.0}));
}

TEST(LoadCorpusTest, CsvEmptyLabelMeansAbsent) {
  std::istringstream in("id,label,v0,v1\na,,1,2\n");
  const auto c = read_corpus(in, CorpusFormat::kCsv, "t");
  EXPECT_FALSE(c[0].label.has_value());
}

std::string error_of(const std::string& file, CorpusFormat f = CorpusFormat::kJsonl) {
  try {
    load_corpus(fixture(file), f);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    return e.what();
  }
  return "";
}

TEST(LoadCorpusTest, RejectsBadInputs) {
  EXPECT_NE(error_of("zero_norm.jsonl").find("zero-norm vector at id z"), std::string::npos);
  EXPECT_NE(error_of("bad_dim.jsonl").find("dimension mismatch at id b"), std::string::npos);
  EXPECT_NE(error_of("duplicate.jsonl").find("duplicate id a"), std::string::npos);
  EXPECT_NE(error_of("empty.jsonl").find("empty"), std::string::npos);
  EXPECT_NE(error_of("malformed.jsonl").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("no_such_file.jsonl").find("cannot open"), std::string::npos);
}

TEST(LoadCorpusTest, CsvRejectsBadHeaderAndNumbers) {
  std::istringstream bad_header("name,label,v0\na,,1\n");
  EXPECT_THROW(read_corpus(bad_header, CorpusFormat::kCsv, "t"), Error);
  std::istringstream bad_number("id,label,v0,v1\na,,1,abc\n");
  EXPECT_THROW(read_corpus(bad_number, CorpusFormat::kCsv, "t"), Error);
  std::istringstream short_row("id,label,v0,v1\na,,1,2\nb,,1\n");
  try {
    read_corpus(short_row, CorpusFormat::kCsv, "t");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("dimension mismatch at id b"), std::string::npos);
  }
}

TEST(LoadCorpusTest, JsonlRejectsWrongTypes) {
  for (const char* line : {R"({"vector":[1,2]})", R"({"id":"a"})",
                           R"({"id":"a","vector":[1,"x"]})",
                           R"({"id":"a","vector":[1,2],"label":3})", "[1,2]"}) {
    std::istringstream in(line);
    EXPECT_THROW(read_corpus(in, CorpusFormat::kJsonl, "t"), Error) << line;
  }
}

// Property: load -> write -> load is the identity on records, both formats.
TEST(LoadCorpusTest, ReserializeRoundTripIsBitwise) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const auto original = testing::random_corpus(50, 1 + seed % 12, seed, 3);
    for (auto format : {CorpusFormat::kJsonl, CorpusFormat::kCsv}) {
      std::stringstream first;
      write_corpus(first, original, format);
      const auto loaded = read_corpus(first, format, "random");
      std::stringstream second;
      write_corpus(second, loaded, format);
      const auto reloaded = read_corpus(second, format, "random");
      for (std::size_t i = 0; i < original.size(); ++i) {
        EXPECT_EQ(loaded[i].vector, original[i].vector);
        EXPECT_EQ(reloaded[i].vector, loaded[i].vector);
        EXPECT_EQ(reloaded[i].id, original[i].id);
        EXPECT_EQ(reloaded[i].label, original[i].label);
      }
    }
  }
}

TEST(CorpusTest, SubsetCopiesBitsAndValidates) {
  const auto c = testing::random_corpus(10, 4, 1);
  const std::vector<std::size_t> idx{7, 2};
  const auto s = c.subset(idx, "s");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], c[7]);
  EXPECT_EQ(s[1], c[2]);
  const std::vector<std::size_t> repeat{1, 1};
  EXPECT_THROW(c.subset(repeat, "x"), Error);
  const std::vector<std::size_t> out_of_range{10};
  EXPECT_THROW(c.subset(out_of_range, "x"), Error);
}

}  // namespace
}  // namespace ttedepth
