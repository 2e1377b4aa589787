#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "ttedepth/corpus.hpp"
#include "ttedepth/depth.hpp"
#include "ttedepth/error.hpp"
#include "ttedepth/exact_sum.hpp"
#include "ttedepth/parallel.hpp"
#include "ttedepth/random.hpp"
#include "ttedepth/ranksum.hpp"

namespace ttedepth {

enum class Family { kUniformSphere, kConcentrated };

inline std::string_view to_string(Family f) {
  return f == Family::kUniformSphere ? "uniform-sphere" : "concentrated";
}

inline Family parse_family(std::string_view s) {
  if (s == "uniform-sphere" || s == "uniform") return Family::kUniformSphere;
  if (s == "concentrated") return Family::kConcentrated;
  throw_invalid("unknown generator family '" + std::string(s) +
                "' (expected uniform-sphere or concentrated)");
}

/// Synthetic directional population.
///
/// uniform-sphere: i.i.d. standard normal coordinates, normalized.
/// concentrated: mean_direction + noise / concentration with i.i.d. standard
/// normal noise, normalized. An infinite concentration returns the mean
/// direction itself; concentration 0 is pure noise.
struct GeneratorSpec {
  std::size_t dim = 2;
  Family family = Family::kUniformSphere;
  double concentration = 0.0;
  std::vector<double> mean_direction;  // concentrated only; length dim

  /// Unit vector along coordinate `axis`.
  static std::vector<double> axis(std::size_t dim, std::size_t axis) {
    if (axis >= dim) throw_invalid("axis out of range");
    std::vector<double> v(dim, 0.0);
    v[axis] = 1.0;
    return v;
  }
};

inline void validate(const GeneratorSpec& spec) {
  if (spec.dim < 2) throw_invalid("generator dimension must be >= 2");
  if (spec.family == Family::kConcentrated) {
    if (std::isnan(spec.concentration) || spec.concentration < 0.0)
      throw_invalid("concentration must be >= 0");
    if (spec.mean_direction.size() != spec.dim)
      throw_invalid("mean direction must have length " + std::to_string(spec.dim));
  }
}

/// `size` records with ids "<name>-<i>", deterministic in `seed`.
inline Corpus generate_population(const GeneratorSpec& spec, std::size_t size,
                                  std::uint64_t seed,
                                  const std::string& name = "synthetic") {
  validate(spec);
  if (size == 0) throw_invalid("population size must be >= 1");

  std::vector<double> mean;
  double noise_scale = 1.0;
  if (spec.family == Family::kConcentrated) {
    mean = normalize(spec.mean_direction);
    noise_scale = std::isinf(spec.concentration) ? 0.0 : 1.0 / spec.concentration;
  }

  Rng rng(seed);
  std::vector<EmbeddingRecord> records(size);
  for (std::size_t i = 0; i < size; ++i) {
    auto& r = records[i];
    r.id = name + "-" + std::to_string(i);
    r.vector.assign(spec.dim, 0.0);
    do {
      for (std::size_t d = 0; d < spec.dim; ++d) {
        if (spec.family == Family::kUniformSphere) {
          r.vector[d] = rng.normal();
        } else if (spec.concentration == 0.0) {
          r.vector[d] = rng.normal();
        } else if (noise_scale == 0.0) {
          r.vector[d] = mean[d];
        } else {
          r.vector[d] = mean[d] + noise_scale * rng.normal();
        }
      }
    } while (std::all_of(r.vector.begin(), r.vector.end(),
                         [](double v) { return v == 0.0; }));
  }
  return Corpus::from_records(name, std::move(records));
}

/// `n` distinct records drawn without replacement, kept in corpus order.
inline Corpus sample_without_replacement(const Corpus& population,
                                         std::size_t n, Rng& rng,
                                         const std::string& name) {
  if (n == 0 || n > population.size()) {
    throw_invalid("cannot sample " + std::to_string(n) + " records from '" +
                  population.name() + "' of size " +
                  std::to_string(population.size()));
  }
  std::vector<std::size_t> idx(population.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return population.subset(idx, name);
}

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for one value
};

inline SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  s.mean = exact_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    ExactSum ss;
    for (double v : values) ss.add((v - s.mean) * (v - s.mean));
    s.std = std::sqrt(ss.result() / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct StudyConfig {
  std::vector<std::size_t> sample_sizes{5, 25, 50, 100, 500};
  std::size_t replicates = 20;
  std::uint64_t seed = 0;
  DistanceKind distance = DistanceKind::kCosine;
  QueryDepthRule rule = QueryDepthRule::kAugmented;
};

struct SampleSizeRow {
  std::size_t n = 0;
  double mean_q = 0.0;
  double std_q = 0.0;
  std::vector<double> q_values;  // one per replicate, replicate order

  bool operator==(const SampleSizeRow&) const = default;
};

struct StudyResult {
  std::vector<SampleSizeRow> rows;
  double population_q = 0.0;  // Q estimate on the full populations
  std::size_t population_f = 0;
  std::size_t population_g = 0;
  DistanceKind distance = DistanceKind::kCosine;

  bool operator==(const StudyResult&) const = default;
};

namespace detail {

inline constexpr std::uint64_t kStreamF = 0xF;
inline constexpr std::uint64_t kStreamG = 0x6;

}  // namespace detail

/// For each sample size n and replicate r, draws n records from each
/// population without replacement (streams keyed by (seed, n, r)) and records
/// the Q estimate of the G-sample against the F-sample. Replicates run in
/// parallel; results are independent of the worker count.
inline StudyResult sample_size_study(const StudyConfig& config,
                                     const Corpus& pop_f, const Corpus& pop_g,
                                     unsigned threads = 1) {
  if (config.sample_sizes.empty()) throw_invalid("no sample sizes given");
  if (config.replicates == 0) throw_invalid("replicates must be >= 1");
  if (pop_f.dim() != pop_g.dim())
    throw_invalid("populations differ in dimensionality");
  for (std::size_t n : config.sample_sizes) {
    if (n < 2) throw_invalid("sample sizes must be >= 2");
    if (n > pop_f.size() || n > pop_g.size()) {
      throw_invalid("sample size " + std::to_string(n) +
                    " exceeds a population (" + std::to_string(pop_f.size()) +
                    ", " + std::to_string(pop_g.size()) + ")");
    }
  }

  StudyResult result;
  result.distance = config.distance;
  result.population_f = pop_f.size();
  result.population_g = pop_g.size();
  result.population_q =
      q_estimate(pop_f, pop_g, config.distance, config.rule, threads).q_hat;

  for (std::size_t n : config.sample_sizes) {
    SampleSizeRow row;
    row.n = n;
    row.q_values.resize(config.replicates);
    parallel_for(config.replicates, threads, [&](std::size_t r) {
      Rng rng_f(derive_seed(config.seed, {n, r, detail::kStreamF}));
      Rng rng_g(derive_seed(config.seed, {n, r, detail::kStreamG}));
      const Corpus f = sample_without_replacement(pop_f, n, rng_f, pop_f.name());
      const Corpus g = sample_without_replacement(pop_g, n, rng_g, pop_g.name());
      row.q_values[r] = q_estimate(f, g, config.distance, config.rule, 1).q_hat;
    });
    const auto stats = summarize(row.q_values);
    row.mean_q = stats.mean;
    row.std_q = stats.std;
    result.rows.push_back(std::move(row));
  }
  return result;
}

struct TwoSampleConfig {
  GeneratorSpec generator_f;
  GeneratorSpec generator_g;  // same as generator_f for null calibration
  std::size_t m = 100;
  std::size_t n = 100;
  std::size_t replicates = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  DistanceKind distance = DistanceKind::kCosine;
  QueryDepthRule rule = QueryDepthRule::kAugmented;
};

struct CalibrationReport {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t replicates = 0;
  double alpha = 0.0;
  double mean_q = 0.0;
  double std_q = 0.0;
  double rejection_rate = 0.0;  // fraction of replicates with p < alpha
  double theoretical_std = 0.0; // sqrt((1/m + 1/n) / 12)
  std::vector<double> q_values;
  std::vector<double> p_values;
  std::vector<std::string> warnings;

  bool operator==(const CalibrationReport&) const = default;
};

/// Repeated two-sample tests on fresh samples from two generators. With
/// identical generators the rejection rate estimates the test's size; with
/// different ones, its power.
inline CalibrationReport two_sample_replicates(const TwoSampleConfig& config,
                                               unsigned threads = 1) {
  validate(config.generator_f);
  validate(config.generator_g);
  if (config.generator_f.dim != config.generator_g.dim)
    throw_invalid("generators differ in dimensionality");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw_invalid("alpha must lie in (0, 1)");
  if (config.m == 0 || config.n == 0) throw_invalid("m and n must be >= 1");
  if (config.replicates == 0) throw_invalid("replicates must be >= 1");

  CalibrationReport report;
  report.m = config.m;
  report.n = config.n;
  report.replicates = config.replicates;
  report.alpha = config.alpha;
  report.theoretical_std = std::sqrt(
      (1.0 / static_cast<double>(config.m) + 1.0 / static_cast<double>(config.n)) /
      12.0);
  if (config.replicates < 100) {
    report.warnings.push_back("fewer than 100 replicates; rates are coarse");
  }
  report.q_values.resize(config.replicates);
  report.p_values.resize(config.replicates);

  parallel_for(config.replicates, threads, [&](std::size_t r) {
    const Corpus f = generate_population(
        config.generator_f, config.m,
        derive_seed(config.seed, {r, detail::kStreamF}), "f");
    const Corpus g = generate_population(
        config.generator_g, config.n,
        derive_seed(config.seed, {r, detail::kStreamG}), "g");
    const auto test = rank_sum_test(f, g, config.distance, config.rule, 1);
    report.q_values[r] = test.q_hat;
    report.p_values[r] = test.p_one_sided;
  });

  const auto stats = summarize(report.q_values);
  report.mean_q = stats.mean;
  report.std_q = stats.std;
  const auto rejected = std::count_if(report.p_values.begin(), report.p_values.end(),
                                      [&](double p) { return p < config.alpha; });
  report.rejection_rate =
      static_cast<double>(rejected) / static_cast<double>(config.replicates);
  return report;
}

/// Null calibration: both samples come from the same generator each replicate.
inline CalibrationReport null_calibration(const GeneratorSpec& generator,
                                          std::size_t m, std::size_t n,
                                          std::size_t replicates, double alpha,
                                          std::uint64_t seed, DistanceKind kind,
                                          QueryDepthRule rule = QueryDepthRule::kAugmented,
                                          unsigned threads = 1) {
  TwoSampleConfig config;
  config.generator_f = generator;
  config.generator_g = generator;
  config.m = m;
  config.n = n;
  config.replicates = replicates;
  config.alpha = alpha;
  config.seed = seed;
  config.distance = kind;
  config.rule = rule;
  return two_sample_replicates(config, threads);
}

}  // namespace ttedepth
