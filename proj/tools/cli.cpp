#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttedepth/ttedepth.hpp"

namespace ttedepth::cli {
namespace {

struct CommonOptions {
  std::string distance = "cosine";
  std::string format = "jsonl";
  std::string report_format = "json";
  std::string out_path;
  unsigned threads = 0;
};

void add_common(CLI::App& sub, CommonOptions& o) {
  sub.add_option("--distance", o.distance, "Distance: cosine or chord")
      ->check(CLI::IsMember({"cosine", "chord"}));
  sub.add_option("--format", o.format, "Input corpus format: jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  sub.add_option("--report-format", o.report_format, "Report format");
  sub.add_option("--out", o.out_path, "Write the report here instead of stdout");
  sub.add_option("--threads", o.threads,
                 "Worker threads (0 = all cores); output does not depend on it");
}

std::vector<std::size_t> parse_size_list(const std::string& text,
                                         const std::string& flag) {
  std::vector<std::size_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty())
      throw_invalid("bad value '" + item + "' for " + flag);
    values.push_back(v);
  }
  if (values.empty()) throw_invalid("empty list for " + flag);
  return values;
}

void require_report_format(const CommonOptions& o,
                           std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (o.report_format == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw_invalid("--report-format " + o.report_format + " not supported here (use " +
                list + ")");
}

// Writes to --out when given, otherwise to `out`.
void emit(const CommonOptions& o, std::ostream& out,
          const std::function<void(std::ostream&)>& write) {
  if (o.out_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw_data("cannot write " + o.out_path);
  write(file);
  if (!file) throw_data("failed writing " + o.out_path);
}

void write_side_file(const std::string& path,
                     const std::function<void(std::ostream&)>& write) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw_data("cannot write " + path);
  write(file);
  if (!file) throw_data("failed writing " + path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Text-embedding depth: rankings, medians, rank-sum tests, "
               "exemplar selection and calibration studies",
               "ttedepth"};
  app.require_subcommand(1);

  // depth
  CommonOptions depth_opts;
  std::string depth_path;
  auto* depth_cmd = app.add_subcommand("depth", "Depth of every record, ordering and median");
  depth_cmd->add_option("corpus", depth_path, "Corpus file")->required();
  add_common(*depth_cmd, depth_opts);

  // compare
  CommonOptions cmp_opts;
  std::string cmp_ref, cmp_query, cmp_sample, cmp_rule = "augmented";
  std::optional<std::uint64_t> cmp_seed;
  bool cmp_two_sided = false;
  auto* cmp_cmd = app.add_subcommand("compare", "Depth rank-sum test of a query corpus against a reference");
  cmp_cmd->add_option("reference", cmp_ref, "Reference corpus (F)")->required();
  cmp_cmd->add_option("query", cmp_query, "Query corpus (G)")->required();
  cmp_cmd->add_option("--sample", cmp_sample, "Sample m,n records first (needs --seed)");
  cmp_cmd->add_option("--seed", cmp_seed, "Seed for --sample");
  cmp_cmd->add_option("--query-depth", cmp_rule, "Query depth rule: augmented or literal")
      ->check(CLI::IsMember({"augmented", "literal"}));
  cmp_cmd->add_flag("--two-sided", cmp_two_sided, "Also report a two-sided p-value");
  add_common(*cmp_cmd, cmp_opts);

  // select
  CommonOptions sel_opts;
  std::string sel_path, sel_strategy;
  std::size_t sel_n = 0;
  std::uint64_t sel_seed = 0;
  auto* sel_cmd = app.add_subcommand("select", "Rank and select in-context exemplars");
  sel_cmd->add_option("corpus", sel_path, "Labeled training corpus")->required();
  sel_cmd->add_option("--strategy", sel_strategy, "RAND, LDM, DEEP or DLDM")->required();
  sel_cmd->add_option("--n", sel_n, "Number of exemplars")->required();
  sel_cmd->add_option("--seed", sel_seed, "Seed")->required();
  add_common(*sel_cmd, sel_opts);

  // simulate
  CommonOptions sim_opts;
  std::string sim_f, sim_g, sim_sizes = "5,25,50,100,500", sim_raw, sim_rule = "augmented";
  std::size_t sim_reps = 20;
  std::uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample-size study of the Q estimate");
  sim_cmd->add_option("population_f", sim_f, "Reference population")->required();
  sim_cmd->add_option("population_g", sim_g, "Query population")->required();
  sim_cmd->add_option("--sizes", sim_sizes, "Comma-separated sample sizes");
  sim_cmd->add_option("--replicates", sim_reps, "Replicates per sample size");
  sim_cmd->add_option("--seed", sim_seed, "Seed")->required();
  sim_cmd->add_option("--raw-out", sim_raw, "CSV of raw replicate values");
  sim_cmd->add_option("--query-depth", sim_rule, "Query depth rule")
      ->check(CLI::IsMember({"augmented", "literal"}));
  add_common(*sim_cmd, sim_opts);

  // calibrate
  CommonOptions cal_opts;
  std::size_t cal_dim = 16, cal_m = 100, cal_n = 100, cal_reps = 500, cal_axis = 0;
  std::optional<std::size_t> cal_g_axis;
  double cal_alpha = 0.05, cal_conc = 0.0;
  std::string cal_family = "uniform-sphere", cal_raw, cal_rule = "augmented";
  std::uint64_t cal_seed = 0;
  auto* cal_cmd = app.add_subcommand(
      "calibrate", "Monte-Carlo size (or, with --g-axis, power) of the rank-sum test");
  cal_cmd->add_option("--dim", cal_dim, "Dimension");
  cal_cmd->add_option("--family", cal_family, "uniform-sphere or concentrated")
      ->check(CLI::IsMember({"uniform-sphere", "concentrated"}));
  cal_cmd->add_option("--concentration", cal_conc, "Concentration (concentrated family)");
  cal_cmd->add_option("--axis", cal_axis, "Mean-direction axis of F (concentrated family)");
  cal_cmd->add_option("--g-axis", cal_g_axis,
                      "Mean-direction axis of G; omit for a null calibration");
  cal_cmd->add_option("--m", cal_m, "Reference sample size");
  cal_cmd->add_option("--n", cal_n, "Query sample size");
  cal_cmd->add_option("--replicates", cal_reps, "Replicates");
  cal_cmd->add_option("--alpha", cal_alpha, "Significance level");
  cal_cmd->add_option("--seed", cal_seed, "Seed")->required();
  cal_cmd->add_option("--raw-out", cal_raw, "CSV of raw replicate values");
  cal_cmd->add_option("--query-depth", cal_rule, "Query depth rule")
      ->check(CLI::IsMember({"augmented", "literal"}));
  add_common(*cal_cmd, cal_opts);

  // mcnemar
  CommonOptions mc_opts;
  std::uint64_t mc_b = 0, mc_c = 0;
  auto* mc_cmd = app.add_subcommand("mcnemar", "McNemar test on discordant counts");
  mc_cmd->add_option("--b", mc_b, "Pairs only classifier A got right")->required();
  mc_cmd->add_option("--c", mc_c, "Pairs only classifier B got right")->required();
  add_common(*mc_cmd, mc_opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "ttedepth: error: " << msg << '\n';
    return kExitUsage;
  }

  try {
    if (*depth_cmd) {
      const auto& o = depth_opts;
      require_report_format(o, {"json", "csv"});
      const auto corpus = load_corpus(depth_path, parse_corpus_format(o.format));
      const auto report = depth_scores(corpus, parse_distance(o.distance), o.threads);
      emit(o, out, [&](std::ostream& s) {
        if (o.report_format == "csv") write_csv(s, report);
        else s << to_json(report).dump(2) << '\n';
      });
    } else if (*cmp_cmd) {
      const auto& o = cmp_opts;
      require_report_format(o, {"json", "csv"});
      const auto format = parse_corpus_format(o.format);
      auto reference = load_corpus(cmp_ref, format);
      auto query = load_corpus(cmp_query, format);
      std::optional<std::vector<std::size_t>> sizes;
      if (!cmp_sample.empty()) {
        sizes = parse_size_list(cmp_sample, "--sample");
        if (sizes->size() != 2) throw_invalid("--sample expects m,n");
        if (!cmp_seed) throw_invalid("--sample requires --seed");
        Rng rng_f(derive_seed(*cmp_seed, {detail::kStreamF}));
        Rng rng_g(derive_seed(*cmp_seed, {detail::kStreamG}));
        reference = sample_without_replacement(reference, (*sizes)[0], rng_f,
                                               reference.name());
        query = sample_without_replacement(query, (*sizes)[1], rng_g, query.name());
      }
      const auto report =
          rank_sum_test(reference, query, parse_distance(o.distance),
                        parse_query_depth_rule(cmp_rule), o.threads);
      emit(o, out, [&](std::ostream& s) {
        if (o.report_format == "csv") {
          write_csv(s, report);
          return;
        }
        Json j;
        j["reference"] = reference.name();
        j["query"] = query.name();
        j["table_row"] = table_row(report);
        j["report"] = to_json(report, cmp_two_sided);
        if (sizes) j["sample_seed"] = *cmp_seed;
        s << j.dump(2) << '\n';
      });
    } else if (*sel_cmd) {
      const auto& o = sel_opts;
      require_report_format(o, {"json", "jsonl"});
      const auto corpus = load_corpus(sel_path, parse_corpus_format(o.format));
      const auto plan = select(corpus, parse_strategy(sel_strategy), sel_n, sel_seed,
                               parse_distance(o.distance), o.threads);
      for (const auto& w : plan.warnings) err << "ttedepth: warning: " << w << '\n';
      emit(o, out, [&](std::ostream& s) {
        if (o.report_format == "jsonl") write_selected_jsonl(s, plan, corpus);
        else s << to_json(plan).dump(2) << '\n';
      });
    } else if (*sim_cmd) {
      const auto& o = sim_opts;
      require_report_format(o, {"json", "csv"});
      const auto format = parse_corpus_format(o.format);
      const auto pop_f = load_corpus(sim_f, format);
      const auto pop_g = load_corpus(sim_g, format);
      StudyConfig config;
      config.sample_sizes = parse_size_list(sim_sizes, "--sizes");
      config.replicates = sim_reps;
      config.seed = sim_seed;
      config.distance = parse_distance(o.distance);
      config.rule = parse_query_depth_rule(sim_rule);
      const auto result = sample_size_study(config, pop_f, pop_g, o.threads);
      if (!sim_raw.empty())
        write_side_file(sim_raw, [&](std::ostream& s) { write_raw_csv(s, result); });
      emit(o, out, [&](std::ostream& s) {
        if (o.report_format == "csv") write_csv(s, result);
        else s << to_json(result).dump(2) << '\n';
      });
    } else if (*cal_cmd) {
      const auto& o = cal_opts;
      require_report_format(o, {"json", "csv"});
      TwoSampleConfig config;
      config.generator_f.dim = cal_dim;
      config.generator_f.family = parse_family(cal_family);
      config.generator_f.concentration = cal_conc;
      if (config.generator_f.family == Family::kConcentrated)
        config.generator_f.mean_direction = GeneratorSpec::axis(cal_dim, cal_axis);
      config.generator_g = config.generator_f;
      if (cal_g_axis) {
        if (config.generator_f.family != Family::kConcentrated)
          throw_invalid("--g-axis requires --family concentrated");
        config.generator_g.mean_direction = GeneratorSpec::axis(cal_dim, *cal_g_axis);
      }
      config.m = cal_m;
      config.n = cal_n;
      config.replicates = cal_reps;
      config.alpha = cal_alpha;
      config.seed = cal_seed;
      config.distance = parse_distance(o.distance);
      config.rule = parse_query_depth_rule(cal_rule);
      const auto report = two_sample_replicates(config, o.threads);
      for (const auto& w : report.warnings) err << "ttedepth: warning: " << w << '\n';
      if (!cal_raw.empty())
        write_side_file(cal_raw, [&](std::ostream& s) { write_raw_csv(s, report); });
      emit(o, out, [&](std::ostream& s) {
        if (o.report_format == "csv") write_csv(s, report);
        else s << to_json(report).dump(2) << '\n';
      });
    } else if (*mc_cmd) {
      const auto& o = mc_opts;
      require_report_format(o, {"json", "csv"});
      const auto result = mcnemar(mc_b, mc_c);
      emit(o, out, [&](std::ostream& s) {
        if (o.report_format == "csv") write_csv(s, result);
        else s << to_json(result).dump(2) << '\n';
      });
    }
  } catch (const Error& e) {
    err << "ttedepth: error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kData ? kExitData : kExitUsage;
  } catch (const std::exception& e) {
    err << "ttedepth: error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ttedepth::cli
