#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ttedepth/corpus.hpp"
#include "ttedepth/depth.hpp"
#include "ttedepth/error.hpp"
#include "ttedepth/normal.hpp"

namespace ttedepth {

/// How a query that is not itself a reference record is scored.
///
/// Reference depths include each record's zero self-distance. kAugmented
/// scores an outside query the same way, as if it had been added to the
/// reference: 2 - (sum of distances to the reference + 0) / (m + 1). This keeps
/// query and reference depths exchangeable under F = G. kLiteral uses the plain
/// depth w.r.t. the reference, 2 - (sum of distances) / m, which ranks outside
/// queries systematically lower by about mean-distance / m.
///
/// A query whose vector is bit-identical to a reference vector is a member of
/// the reference under both rules and gets exactly that member's depth.
enum class QueryDepthRule { kAugmented, kLiteral };

inline std::string_view to_string(QueryDepthRule r) {
  return r == QueryDepthRule::kAugmented ? "augmented" : "literal";
}

inline QueryDepthRule parse_query_depth_rule(std::string_view s) {
  if (s == "augmented") return QueryDepthRule::kAugmented;
  if (s == "literal") return QueryDepthRule::kLiteral;
  throw_invalid("unknown query depth rule '" + std::string(s) +
                "' (expected augmented or literal)");
}

struct RankSumReport {
  double q_hat = 0.0;
  double w = 0.0;            // q_hat - 1/2
  double z = 0.0;            // w / sqrt((1/m + 1/n) / 12)
  double p_one_sided = 0.0;  // Phi(z), H_a: Q < 1/2
  std::size_t m = 0;         // reference sample size
  std::size_t n = 0;         // query sample size
  double med_ref_depth = 0.0;
  double med_query_depth = 0.0;
  std::string med_ref_id;
  std::string med_query_id;
  DistanceKind distance = DistanceKind::kCosine;
  QueryDepthRule rule = QueryDepthRule::kAugmented;

  /// Two-sided normal p-value 2 Phi(-|z|); not part of the one-sided test.
  double p_two_sided() const { return std::min(1.0, 2.0 * normal_cdf(-std::fabs(z))); }

  bool operator==(const RankSumReport&) const = default;
};

/// Fraction of reference depths that are <= y_depth (exact comparison).
inline double r_fraction(double y_depth, std::span<const double> ref_depths) {
  if (ref_depths.empty()) throw_invalid("r_fraction: empty reference depths");
  const auto count = std::count_if(ref_depths.begin(), ref_depths.end(),
                                   [&](double d) { return d <= y_depth; });
  return static_cast<double>(count) / static_cast<double>(ref_depths.size());
}

/// Fills w, z and the one-sided p-value for a given Q estimate.
inline RankSumReport wilcoxon_test(double q_hat, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw_invalid("wilcoxon_test: sample sizes must be >= 1");
  if (!(q_hat >= 0.0 && q_hat <= 1.0))
    throw_invalid("wilcoxon_test: q_hat must lie in [0, 1]");
  RankSumReport r;
  r.q_hat = q_hat;
  r.m = m;
  r.n = n;
  r.w = q_hat - 0.5;
  const double var = (1.0 / static_cast<double>(m) + 1.0 / static_cast<double>(n)) / 12.0;
  r.z = r.w / std::sqrt(var);
  // Kept strictly inside (0, 1) even where Phi under- or overflows.
  r.p_one_sided = std::clamp(normal_cdf(r.z), std::numeric_limits<double>::denorm_min(),
                             std::nextafter(1.0, 0.0));
  return r;
}

namespace detail {

struct VectorKey {
  std::span<const double> v;
  bool operator==(const VectorKey& o) const {
    return v.size() == o.v.size() &&
           std::memcmp(v.data(), o.v.data(), v.size() * sizeof(double)) == 0;
  }
};

struct VectorKeyHash {
  std::size_t operator()(const VectorKey& k) const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(k.v.data());
    for (std::size_t i = 0; i < k.v.size() * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001B3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Depth of each query as used for ranking against `reference` (see
/// QueryDepthRule). `ref_depths` are the reference's own depths.
inline std::vector<double> query_depths(const Corpus& reference,
                                        std::span<const double> ref_depths,
                                        const Corpus& queries,
                                        DistanceKind kind, QueryDepthRule rule,
                                        unsigned threads = 1) {
  std::unordered_map<detail::VectorKey, std::size_t, detail::VectorKeyHash> members;
  for (std::size_t j = 0; j < reference.size(); ++j)
    members.emplace(detail::VectorKey{reference.vector(j)}, j);

  const auto sums = distance_sums(queries, reference, kind, threads);
  const double m = static_cast<double>(reference.size());
  std::vector<double> depths(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (auto it = members.find(detail::VectorKey{queries.vector(i)});
        it != members.end()) {
      depths[i] = ref_depths[it->second];
    } else if (rule == QueryDepthRule::kAugmented) {
      depths[i] = 2.0 - sums[i] / (m + 1.0);
    } else {
      depths[i] = 2.0 - sums[i] / m;
    }
  }
  return depths;
}

/// Q estimate of the query sample against the reference sample: the mean over
/// queries of r_fraction(query depth, reference depths). Fills q_hat, the
/// sample sizes and both median depths; w, z and p are left at zero.
inline RankSumReport q_estimate(const Corpus& reference, const Corpus& queries,
                                DistanceKind kind,
                                QueryDepthRule rule = QueryDepthRule::kAugmented,
                                unsigned threads = 1) {
  if (reference.empty() || queries.empty())
    throw_invalid("q_estimate: both corpora must be non-empty");
  const DepthReport ref = depth_scores(reference, kind, threads);
  const auto q_depths =
      query_depths(reference, ref.scores, queries, kind, rule, threads);

  std::vector<double> sorted(ref.scores);
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t total = 0;
  for (double d : q_depths) {
    total += static_cast<std::uint64_t>(
        std::upper_bound(sorted.begin(), sorted.end(), d) - sorted.begin());
  }

  RankSumReport r;
  r.m = reference.size();
  r.n = queries.size();
  // Integer count over m*n: a single rounding, so the identity case gives
  // exactly (m+1)/(2m).
  r.q_hat = static_cast<double>(total) /
            (static_cast<double>(r.m) * static_cast<double>(r.n));
  r.med_ref_depth = ref.median_depth();
  r.med_ref_id = ref.median_id();
  const auto best = center_outward_order(q_depths).front();
  r.med_query_depth = q_depths[best];
  r.med_query_id = queries[best].id;
  r.distance = kind;
  r.rule = rule;
  return r;
}

/// q_estimate followed by wilcoxon_test.
inline RankSumReport rank_sum_test(const Corpus& reference,
                                   const Corpus& queries, DistanceKind kind,
                                   QueryDepthRule rule = QueryDepthRule::kAugmented,
                                   unsigned threads = 1) {
  RankSumReport r = q_estimate(reference, queries, kind, rule, threads);
  const RankSumReport t = wilcoxon_test(r.q_hat, r.m, r.n);
  r.w = t.w;
  r.z = t.z;
  r.p_one_sided = t.p_one_sided;
  return r;
}

struct McNemarResult {
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  double chi2 = 0.0;
  double p = 1.0;
};

/// Continuity-corrected McNemar test on discordant counts b and c:
/// chi2 = max(|b - c| - 1, 0)^2 / (b + c), p from chi-square(1). No discordant
/// pairs gives chi2 = 0, p = 1.
inline McNemarResult mcnemar(std::uint64_t b, std::uint64_t c) {
  McNemarResult r{b, c, 0.0, 1.0};
  if (b + c == 0) return r;
  const double diff = static_cast<double>(b > c ? b - c : c - b);
  const double num = std::max(diff - 1.0, 0.0);
  r.chi2 = num * num / static_cast<double>(b + c);
  r.p = chi_square1_upper(r.chi2);
  return r;
}

}  // namespace ttedepth
