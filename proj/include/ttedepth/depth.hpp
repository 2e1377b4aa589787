#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttedepth/corpus.hpp"
#include "ttedepth/error.hpp"
#include "ttedepth/exact_sum.hpp"
#include "ttedepth/parallel.hpp"

namespace ttedepth {

/// Bounded angular distances; both take values in [0, 2] on unit vectors.
enum class DistanceKind { kCosine, kChord };

inline std::string_view to_string(DistanceKind k) {
  return k == DistanceKind::kCosine ? "cosine" : "chord";
}

inline DistanceKind parse_distance(std::string_view s) {
  if (s == "cosine") return DistanceKind::kCosine;
  if (s == "chord") return DistanceKind::kChord;
  throw_invalid("unknown distance '" + std::string(s) +
                "' (expected cosine or chord)");
}

namespace detail {

// Both branches clamp to [0, 2]: rounding in the dot product can put
// 1 - x'y a few ulps outside the mathematical range.
inline double cosine_from(double xy, double norm_x, double norm_y) {
  return std::clamp(1.0 - xy / (norm_x * norm_y), 0.0, 2.0);
}

inline double chord_from(double xy) {
  return std::min(std::sqrt(2.0 * std::max(1.0 - xy, 0.0)), 2.0);
}

// Identical vectors are at distance exactly 0; the formulas above can leave
// ~1e-8 (chord) when x.x rounds to 1 - ulp.
inline bool same_bits(std::span<const double> x, std::span<const double> y) {
  return x.size() == y.size() &&
         std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

}  // namespace detail

/// Cosine: 1 - x.y / (|x||y|). Chord: sqrt(2 (1 - x.y)), which assumes unit
/// inputs. Symmetric in its arguments bit-for-bit.
inline double distance(std::span<const double> x, std::span<const double> y,
                       DistanceKind kind) {
  if (x.size() != y.size()) {
    throw_invalid("distance: dimension mismatch (" + std::to_string(x.size()) +
                  " vs " + std::to_string(y.size()) + ")");
  }
  if (detail::same_bits(x, y)) return 0.0;
  const double xy = dot(x, y);
  if (kind == DistanceKind::kChord) return detail::chord_from(xy);
  return detail::cosine_from(xy, std::sqrt(dot(x, x)), std::sqrt(dot(y, y)));
}

/// Per-record depths of a corpus with respect to itself.
struct DepthReport {
  std::string corpus_name;
  DistanceKind distance = DistanceKind::kCosine;
  std::vector<std::string> ids;      // corpus order
  std::vector<double> scores;        // corpus order, each in [0, 2]
  std::vector<std::size_t> ordering; // indices, deepest first
  std::size_t median_index = 0;

  const std::string& median_id() const { return ids[median_index]; }
  double median_depth() const { return scores[median_index]; }

  /// Depth of record `id`; throws if absent.
  double score(std::string_view id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) return scores[i];
    }
    throw_invalid("unknown id " + std::string(id));
  }

  bool operator==(const DepthReport&) const = default;
};

/// For each query, the exact (correctly rounded) sum of its distances to every
/// reference record. Parallel over queries only; each sum is independent of
/// the order of the reference records and of the worker count.
inline std::vector<double> distance_sums(const Corpus& queries,
                                         const Corpus& reference,
                                         DistanceKind kind,
                                         unsigned threads = 1) {
  if (reference.empty()) throw_invalid("reference corpus is empty");
  if (queries.dim() != reference.dim()) {
    throw_invalid("dimension mismatch between '" + queries.name() + "' (" +
                  std::to_string(queries.dim()) + ") and '" + reference.name() +
                  "' (" + std::to_string(reference.dim()) + ")");
  }

  std::vector<double> ref_norms(reference.size());
  for (std::size_t j = 0; j < reference.size(); ++j) {
    ref_norms[j] = std::sqrt(dot(reference.vector(j), reference.vector(j)));
  }

  std::vector<double> sums(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    const auto q = queries.vector(i);
    const double q_norm = std::sqrt(dot(q, q));
    ExactSum acc;
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (detail::same_bits(q, reference.vector(j))) continue;
      const double xy = dot(q, reference.vector(j));
      acc.add(kind == DistanceKind::kChord
                  ? detail::chord_from(xy)
                  : detail::cosine_from(xy, q_norm, ref_norms[j]));
    }
    sums[i] = acc.result();
  });
  return sums;
}

/// Depth of each query w.r.t. the reference: 2 - mean distance to the
/// reference records. Queries are not added to the reference. Result is
/// aligned with query order.
inline std::vector<double> depth_wrt(const Corpus& queries,
                                     const Corpus& reference, DistanceKind kind,
                                     unsigned threads = 1) {
  auto depths = distance_sums(queries, reference, kind, threads);
  const double m = static_cast<double>(reference.size());
  for (double& d : depths) d = 2.0 - d / m;
  return depths;
}

/// Indices sorted by depth, deepest first; ties keep corpus order.
inline std::vector<std::size_t> center_outward_order(
    std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

/// Depth of every record w.r.t. its own corpus. The mean runs over all
/// records, the record itself included, so a singleton has depth 2. The
/// median is the deepest record, earliest in corpus order on ties.
inline DepthReport depth_scores(const Corpus& corpus, DistanceKind kind,
                                unsigned threads = 1) {
  if (corpus.empty()) throw_invalid("depth of an empty corpus");
  DepthReport report;
  report.corpus_name = corpus.name();
  report.distance = kind;
  report.scores = depth_wrt(corpus, corpus, kind, threads);
  report.ids.reserve(corpus.size());
  for (const auto& r : corpus.records()) report.ids.push_back(r.id);
  report.ordering = center_outward_order(report.scores);
  report.median_index = report.ordering.front();
  return report;
}

}  // namespace ttedepth
