#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttedepth/corpus.hpp"
#include "ttedepth/depth.hpp"
#include "ttedepth/error.hpp"
#include "ttedepth/random.hpp"

namespace ttedepth {

/// In-context-learning exemplar ranking strategies.
enum class Strategy {
  kRand,  // seeded shuffle
  kLdm,   // label distribution match over a seeded shuffle
  kDeep,  // deepest first
  kDldm,  // label distribution match over the depth ordering
};

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kRand: return "RAND";
    case Strategy::kLdm: return "LDM";
    case Strategy::kDeep: return "DEEP";
    case Strategy::kDldm: return "DLDM";
  }
  return "RAND";
}

inline Strategy parse_strategy(std::string_view s) {
  std::string upper(s);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "RAND") return Strategy::kRand;
  if (upper == "LDM") return Strategy::kLdm;
  if (upper == "DEEP") return Strategy::kDeep;
  if (upper == "DLDM") return Strategy::kDldm;
  throw_invalid("unknown strategy '" + std::string(s) +
                "' (expected RAND, LDM, DEEP or DLDM)");
}

using LabelCounts = std::map<std::string, std::size_t>;

struct QuotaAllocation {
  LabelCounts quotas;   // every input label, possibly with quota 0
  bool capped = false;  // n exceeded the number of records
};

/// Largest-remainder apportionment of n slots in proportion to label counts.
///
/// Each label first gets floor(n * count / total); leftover slots go by
/// descending remainder, then larger count, then lexicographic label. When n
/// exceeds the total, every label gets its full count and `capped` is set.
inline QuotaAllocation allocate_quotas(const LabelCounts& label_counts,
                                       std::size_t n) {
  if (n == 0) throw_invalid("allocate_quotas: n must be >= 1");
  std::uint64_t total = 0;
  for (const auto& [label, count] : label_counts) total += count;
  if (total == 0) throw_invalid("allocate_quotas: no labeled records");

  QuotaAllocation out;
  if (n >= total) {
    out.quotas = label_counts;
    out.capped = n > total;
    return out;
  }

  struct Share {
    const std::string* label;
    std::size_t count;
    std::uint64_t remainder;  // numerator over `total`
  };
  std::vector<Share> shares;
  std::size_t assigned = 0;
  for (const auto& [label, count] : label_counts) {
    const std::uint64_t scaled = static_cast<std::uint64_t>(n) * count;
    out.quotas[label] = static_cast<std::size_t>(scaled / total);
    assigned += out.quotas[label];
    shares.push_back({&label, count, scaled % total});
  }
  std::sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) {
    if (a.remainder != b.remainder) return a.remainder > b.remainder;
    if (a.count != b.count) return a.count > b.count;
    return *a.label < *b.label;
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    ++out.quotas[*shares[i].label];
  }
  return out;
}

struct SelectionPlan {
  Strategy strategy = Strategy::kRand;
  std::size_t n_exemplars = 0;
  std::uint64_t seed = 0;
  DistanceKind distance = DistanceKind::kCosine;
  std::vector<std::string> selected;
  std::optional<LabelCounts> per_label_quota;
  std::vector<std::string> warnings;

  bool operator==(const SelectionPlan&) const = default;
};

namespace detail {

inline constexpr std::uint64_t kRandStream = 0x52414E44;  // "RAND"

// Picks quota[label] indices from each label's ranked list and emits them
// round-robin across labels, labels ordered by descending quota, then
// descending count, then name.
inline std::vector<std::size_t> take_by_label(
    const std::map<std::string, std::vector<std::size_t>>& ranked,
    const LabelCounts& quotas) {
  std::vector<std::string> labels;
  for (const auto& [label, q] : quotas) labels.push_back(label);
  std::stable_sort(labels.begin(), labels.end(), [&](const auto& a, const auto& b) {
    const auto qa = quotas.at(a), qb = quotas.at(b);
    if (qa != qb) return qa > qb;
    return ranked.at(a).size() > ranked.at(b).size();
  });

  std::vector<std::size_t> out;
  for (std::size_t round = 0;; ++round) {
    bool any = false;
    for (const auto& label : labels) {
      if (round < quotas.at(label)) {
        out.push_back(ranked.at(label)[round]);
        any = true;
      }
    }
    if (!any) break;
  }
  return out;
}

}  // namespace detail

/// Ranks the corpus with `strategy` and returns the first n exemplars.
inline SelectionPlan select(const Corpus& corpus, Strategy strategy,
                            std::size_t n, std::uint64_t seed,
                            DistanceKind kind, unsigned threads = 1) {
  if (corpus.empty()) throw_invalid("select: corpus is empty");
  if (n == 0) throw_invalid("select: n must be >= 1");

  SelectionPlan plan;
  plan.strategy = strategy;
  plan.n_exemplars = n;
  plan.seed = seed;
  plan.distance = kind;
  if (n > corpus.size()) {
    plan.warnings.push_back("requested " + std::to_string(n) +
                            " exemplars but corpus has " +
                            std::to_string(corpus.size()) + "; selecting all");
  }
  const std::size_t take = std::min(n, corpus.size());

  const bool by_label = strategy == Strategy::kLdm || strategy == Strategy::kDldm;
  if (by_label) {
    if (const auto* r = corpus.first_unlabeled())
      throw_data("strategy " + std::string(to_string(strategy)) +
                    " requires labels; record " + r->id + " has none");
  }

  std::vector<std::size_t> picked;
  if (strategy == Strategy::kRand) {
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, {detail::kRandStream}));
    shuffle(std::span(order), rng);
    picked.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  } else if (strategy == Strategy::kDeep) {
    const auto report = depth_scores(corpus, kind, threads);
    picked.assign(report.ordering.begin(),
                  report.ordering.begin() + static_cast<std::ptrdiff_t>(take));
  } else {
    std::map<std::string, std::vector<std::size_t>> ranked;
    if (strategy == Strategy::kLdm) {
      for (std::size_t i = 0; i < corpus.size(); ++i)
        ranked[*corpus[i].label].push_back(i);
      for (auto& [label, idx] : ranked) {
        Rng rng(derive_seed(seed, {hash_string(label)}));
        shuffle(std::span(idx), rng);
      }
    } else {
      const auto report = depth_scores(corpus, kind, threads);
      for (std::size_t i : report.ordering) ranked[*corpus[i].label].push_back(i);
    }
    LabelCounts counts;
    for (const auto& [label, idx] : ranked) counts[label] = idx.size();
    const auto alloc = allocate_quotas(counts, take);
    plan.per_label_quota = alloc.quotas;
    picked = detail::take_by_label(ranked, alloc.quotas);
  }

  plan.selected.reserve(picked.size());
  for (std::size_t i : picked) plan.selected.push_back(corpus[i].id);
  return plan;
}

}  // namespace ttedepth
