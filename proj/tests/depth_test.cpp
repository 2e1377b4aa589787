#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "test_util.hpp"
#include "ttedepth/depth.hpp"

namespace ttedepth {
namespace {

using testing::fixture;

// Frozen from a 40-digit evaluation of the depth formula on the normalized
// fixture vectors.
constexpr double kCosEdge = 1.5690355937288492;
constexpr double kCosDiag = 1.804737854124365;
constexpr double kChordEdge = 1.2734731909655751;
constexpr double kChordDiag = 1.4897554235132136;
constexpr double kCosQuery = 1.7434808320856023;
constexpr double kChordQuery = 1.3694994149595129;

Corpus three_points() {
  return load_corpus(fixture("three_points.jsonl"), CorpusFormat::kJsonl);
}

TEST(DistanceTest, CosineCases) {
  const std::vector<double> e{1, 0}, n{0, 1}, w{-1, 0};
  EXPECT_EQ(distance(e, e, DistanceKind::kCosine), 0.0);
  EXPECT_EQ(distance(e, n, DistanceKind::kCosine), 1.0);
  EXPECT_EQ(distance(e, w, DistanceKind::kCosine), 2.0);
}

TEST(DistanceTest, ChordCases) {
  const std::vector<double> e{1, 0}, n{0, 1}, w{-1, 0};
  EXPECT_DOUBLE_EQ(distance(e, n, DistanceKind::kChord), std::numbers::sqrt2);
  EXPECT_EQ(distance(e, w, DistanceKind::kChord), 2.0);
  EXPECT_EQ(distance(e, e, DistanceKind::kChord), 0.0);
}

TEST(DistanceTest, DimensionMismatchThrows) {
  const std::vector<double> a{1, 0}, b{1, 0, 0};
  EXPECT_THROW(distance(a, b, DistanceKind::kCosine), Error);
}

TEST(DistanceTest, ChordClampsRadicandNearIdentical) {
  // dot(x, x) can round above 1 for unit vectors; distance must stay finite.
  const auto c = testing::random_corpus(300, 17, 5);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double d = distance(c.vector(i), c.vector(i), DistanceKind::kChord);
    EXPECT_FALSE(std::isnan(d));
    EXPECT_GE(d, 0.0);
    EXPECT_LT(d, 1e-7);
  }
}

TEST(DistanceTest, SymmetricAndBoundedProperty) {
  const auto c = testing::random_corpus(60, 9, 8);
  for (auto kind : {DistanceKind::kCosine, DistanceKind::kChord}) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        const double a = distance(c.vector(i), c.vector(j), kind);
        EXPECT_EQ(a, distance(c.vector(j), c.vector(i), kind));
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 2.0);
      }
    }
  }
}

TEST(DistanceTest, ChordSquaredIsTwiceCosine) {
  std::mt19937 gen(99);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> x(8), y(8);
    for (auto& v : x) v = normal(gen);
    for (auto& v : y) v = normal(gen);
    const auto ux = normalize(x), uy = normalize(y);
    const double ch = distance(ux, uy, DistanceKind::kChord);
    EXPECT_NEAR(ch * ch, 2.0 * distance(ux, uy, DistanceKind::kCosine), 1e-9);
  }
}

TEST(DepthScoresTest, ThreePointWorkedExample) {
  const auto c = three_points();
  const auto cos = depth_scores(c, DistanceKind::kCosine);
  EXPECT_NEAR(cos.scores[0], kCosEdge, 1e-15);
  EXPECT_NEAR(cos.scores[1], kCosEdge, 1e-15);
  EXPECT_NEAR(cos.scores[2], kCosDiag, 1e-15);
  EXPECT_EQ(cos.median_id(), "diag");
  EXPECT_EQ(cos.ordering, (std::vector<std::size_t>{2, 0, 1}));

  const auto ch = depth_scores(c, DistanceKind::kChord);
  EXPECT_NEAR(ch.scores[0], kChordEdge, 1e-15);
  EXPECT_NEAR(ch.scores[2], kChordDiag, 1e-15);
  EXPECT_EQ(ch.median_id(), "diag");
}

TEST(DepthScoresTest, SingletonHasDepthTwo) {
  const auto c = Corpus::from_records("one", {{"x", {0.3, -2.0, 5.0}, {}, {}}});
  EXPECT_EQ(depth_scores(c, DistanceKind::kCosine).scores[0], 2.0);
  EXPECT_EQ(depth_scores(c, DistanceKind::kChord).scores[0], 2.0);
}

TEST(DepthScoresTest, EmptyCorpusThrows) {
  EXPECT_THROW(depth_scores(Corpus{}, DistanceKind::kCosine), Error);
}

TEST(DepthScoresTest, MedianTieGoesToEarliestRecord) {
  // Four points symmetric about the origin: all depths are equal.
  const auto c = Corpus::from_records(
      "square", {{"p", {1, 0}, {}, {}}, {"q", {0, 1}, {}, {}},
                 {"r", {-1, 0}, {}, {}}, {"s", {0, -1}, {}, {}}});
  const auto report = depth_scores(c, DistanceKind::kCosine);
  EXPECT_EQ(report.scores[0], report.scores[3]);
  EXPECT_EQ(report.median_id(), "p");
  EXPECT_EQ(report.ordering, (std::vector<std::size_t>{0, 1, 2, 3}));

  // After reordering the tie goes to whichever record now comes first.
  const auto reordered = Corpus::from_records(
      "square", {{"s", {0, -1}, {}, {}}, {"p", {1, 0}, {}, {}},
                 {"q", {0, 1}, {}, {}}, {"r", {-1, 0}, {}, {}}});
  EXPECT_EQ(depth_scores(reordered, DistanceKind::kCosine).median_id(), "s");
}

TEST(DepthScoresTest, MatchesNaiveOracle) {
  for (std::uint32_t seed = 0; seed < 25; ++seed) {
    const auto c = testing::random_corpus(1 + seed * 7, 1 + seed % 31, seed);
    for (auto kind : {DistanceKind::kCosine, DistanceKind::kChord}) {
      const auto report = depth_scores(c, kind);
      const auto oracle = testing::naive_depths(c, c, kind);
      for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_NEAR(report.scores[i], oracle[i], 1e-12);
    }
  }
}

TEST(DepthScoresTest, ReportInvariants) {
  const auto c = testing::random_corpus(80, 6, 42);
  const auto r = depth_scores(c, DistanceKind::kChord);
  ASSERT_EQ(r.ordering.size(), c.size());
  std::vector<std::size_t> sorted = r.ordering;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  for (std::size_t k = 1; k < r.ordering.size(); ++k)
    EXPECT_GE(r.scores[r.ordering[k - 1]], r.scores[r.ordering[k]]);
  for (double s : r.scores) {
    EXPECT_LE(s, r.median_depth());
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 2.0);
  }
}

TEST(DepthScoresTest, PermutationInvariance) {
  const auto records = testing::random_records(120, 10, 17);
  const auto c = Corpus::from_records("c", records);
  const auto base = depth_scores(c, DistanceKind::kCosine);
  std::mt19937 gen(4);
  for (int t = 0; t < 5; ++t) {
    auto shuffled = records;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto report =
        depth_scores(Corpus::from_records("c", shuffled), DistanceKind::kCosine);
    for (std::size_t i = 0; i < report.ids.size(); ++i)
      EXPECT_EQ(report.scores[i], base.score(report.ids[i]));
    EXPECT_EQ(report.median_id(), base.median_id());
  }
}

TEST(DepthScoresTest, BitwiseIdenticalAcrossThreadCounts) {
  const auto c = testing::random_corpus(257, 12, 23);
  for (auto kind : {DistanceKind::kCosine, DistanceKind::kChord}) {
    const auto one = depth_scores(c, kind, 1);
    for (unsigned threads : {2u, 4u, 8u, 13u})
      EXPECT_EQ(depth_scores(c, kind, threads), one);
  }
}

TEST(DepthWrtTest, WorkedExampleAndAgreement) {
  const auto ref = three_points();
  const auto q = load_corpus(fixture("query_point.jsonl"), CorpusFormat::kJsonl);
  EXPECT_NEAR(depth_wrt(q, ref, DistanceKind::kCosine)[0], kCosQuery, 1e-15);
  EXPECT_NEAR(depth_wrt(q, ref, DistanceKind::kChord)[0], kChordQuery, 1e-15);
  EXPECT_EQ(depth_wrt(ref, ref, DistanceKind::kCosine),
            depth_scores(ref, DistanceKind::kCosine).scores);
}

TEST(DepthWrtTest, AntipodalToSingletonIsZero) {
  const auto ref = Corpus::from_records("r", {{"x", {0, 0, 2}, {}, {}}});
  const auto q = Corpus::from_records("q", {{"y", {0, 0, -5}, {}, {}}});
  EXPECT_EQ(depth_wrt(q, ref, DistanceKind::kCosine)[0], 0.0);
  EXPECT_EQ(depth_wrt(q, ref, DistanceKind::kChord)[0], 0.0);
}

TEST(DepthWrtTest, DimensionMismatchThrows) {
  const auto a = testing::random_corpus(3, 2, 1);
  const auto b = testing::random_corpus(3, 3, 1);
  EXPECT_THROW(depth_wrt(a, b, DistanceKind::kCosine), Error);
}

TEST(DepthWrtTest, MatchesNaiveOracle) {
  const auto ref = testing::random_corpus(90, 5, 1);
  const auto q = testing::random_corpus(40, 5, 2);
  const auto got = depth_wrt(q, ref, DistanceKind::kChord, 3);
  const auto oracle = testing::naive_depths(q, ref, DistanceKind::kChord);
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(got[i], oracle[i], 1e-12);
}

TEST(DepthScoresTest, CosineScaleInvariancePowerOfTwo) {
  const auto records = testing::random_records(64, 9, 12);
  const auto base = depth_scores(Corpus::from_records("c", records), DistanceKind::kCosine);
  for (double scale : {0.25, 8.0, 65536.0}) {
    auto scaled = records;
    for (auto& r : scaled)
      for (double& v : r.vector) v *= scale;
    EXPECT_EQ(depth_scores(Corpus::from_records("c", scaled), DistanceKind::kCosine), base);
  }
}

}  // namespace
}  // namespace ttedepth
