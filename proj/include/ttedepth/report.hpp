#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "ttedepth/corpus.hpp"
#include "ttedepth/depth.hpp"
#include "ttedepth/ranksum.hpp"
#include "ttedepth/selection.hpp"
#include "ttedepth/simulate.hpp"

namespace ttedepth {

using Json = nlohmann::ordered_json;

// Numbers are written in shortest round-trip form, so reports are byte-stable.
inline std::string fmt(double v) { return Json(v).dump(); }

inline Json to_json(const DepthReport& r) {
  Json j;
  j["corpus"] = r.corpus_name;
  j["distance"] = to_string(r.distance);
  j["size"] = r.ids.size();
  j["median_id"] = r.median_id();
  j["median_depth"] = r.median_depth();
  Json ordering = Json::array();
  for (std::size_t i : r.ordering) ordering.push_back(r.ids[i]);
  j["ordering"] = std::move(ordering);
  Json scores = Json::object();
  for (std::size_t i = 0; i < r.ids.size(); ++i) scores[r.ids[i]] = r.scores[i];
  j["scores"] = std::move(scores);
  return j;
}

/// `id,depth,rank` rows, deepest first; rank 1 is the median.
inline void write_csv(std::ostream& out, const DepthReport& r) {
  out << "id,depth,rank\n";
  for (std::size_t k = 0; k < r.ordering.size(); ++k) {
    const std::size_t i = r.ordering[k];
    out << r.ids[i] << ',' << fmt(r.scores[i]) << ',' << (k + 1) << '\n';
  }
}

inline Json to_json(const RankSumReport& r, bool two_sided = false) {
  Json j;
  j["q_hat"] = r.q_hat;
  j["w"] = r.w;
  j["z"] = r.z;
  j["p_one_sided"] = r.p_one_sided;
  if (two_sided) j["p_two_sided_non_paper"] = r.p_two_sided();
  j["m"] = r.m;
  j["n"] = r.n;
  j["med_ref_depth"] = r.med_ref_depth;
  j["med_query_depth"] = r.med_query_depth;
  j["med_ref_id"] = r.med_ref_id;
  j["med_query_id"] = r.med_query_id;
  j["distance"] = to_string(r.distance);
  j["query_depth_rule"] = to_string(r.rule);
  return j;
}

/// The comparison-table row: reference median depth, query median depth, Q,
/// W and p.
inline Json table_row(const RankSumReport& r) {
  Json j;
  j["Med Human"] = r.med_ref_depth;
  j["Med Synth"] = r.med_query_depth;
  j["Q"] = r.q_hat;
  j["W"] = r.w;
  j["p"] = r.p_one_sided;
  return j;
}

inline void write_csv(std::ostream& out, const RankSumReport& r) {
  out << "Med Human,Med Synth,Q,W,p\n"
      << fmt(r.med_ref_depth) << ',' << fmt(r.med_query_depth) << ','
      << fmt(r.q_hat) << ',' << fmt(r.w) << ',' << fmt(r.p_one_sided) << '\n';
}

inline Json to_json(const McNemarResult& r) {
  Json j;
  j["b"] = r.b;
  j["c"] = r.c;
  j["chi2"] = r.chi2;
  j["p"] = r.p;
  return j;
}

inline void write_csv(std::ostream& out, const McNemarResult& r) {
  out << "b,c,chi2,p\n"
      << r.b << ',' << r.c << ',' << fmt(r.chi2) << ',' << fmt(r.p) << '\n';
}

inline Json to_json(const SelectionPlan& p) {
  Json j;
  j["strategy"] = to_string(p.strategy);
  j["n"] = p.n_exemplars;
  j["seed"] = p.seed;
  j["distance"] = to_string(p.distance);
  j["selected"] = p.selected;
  if (p.per_label_quota) {
    Json q = Json::object();
    for (const auto& [label, count] : *p.per_label_quota) q[label] = count;
    j["quotas"] = std::move(q);
  } else {
    j["quotas"] = nullptr;
  }
  j["warnings"] = p.warnings;
  return j;
}

/// Selected records in plan order as JSONL ({id, label, text}), ready for
/// prompt assembly.
inline void write_selected_jsonl(std::ostream& out, const SelectionPlan& p,
                                 const Corpus& corpus) {
  for (const auto& id : p.selected) {
    for (const auto& r : corpus.records()) {
      if (r.id != id) continue;
      Json j;
      j["id"] = r.id;
      j["label"] = r.label ? Json(*r.label) : Json(nullptr);
      j["text"] = r.text ? Json(*r.text) : Json(nullptr);
      out << j.dump() << '\n';
      break;
    }
  }
}

inline Json to_json(const StudyResult& s) {
  Json j;
  j["distance"] = to_string(s.distance);
  j["population_f"] = s.population_f;
  j["population_g"] = s.population_g;
  j["population_q"] = s.population_q;
  Json rows = Json::array();
  for (const auto& row : s.rows) {
    Json r;
    r["n"] = row.n;
    r["mean_q"] = row.mean_q;
    r["std_q"] = row.std_q;
    r["q_values"] = row.q_values;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline void write_csv(std::ostream& out, const StudyResult& s) {
  out << "n,mean_q,std_q\n";
  for (const auto& row : s.rows)
    out << row.n << ',' << fmt(row.mean_q) << ',' << fmt(row.std_q) << '\n';
}

/// Companion table of raw replicate values.
inline void write_raw_csv(std::ostream& out, const StudyResult& s) {
  out << "n,replicate,q_hat\n";
  for (const auto& row : s.rows) {
    for (std::size_t r = 0; r < row.q_values.size(); ++r)
      out << row.n << ',' << r << ',' << fmt(row.q_values[r]) << '\n';
  }
}

inline Json to_json(const CalibrationReport& c) {
  Json j;
  j["m"] = c.m;
  j["n"] = c.n;
  j["replicates"] = c.replicates;
  j["alpha"] = c.alpha;
  j["mean_q"] = c.mean_q;
  j["std_q"] = c.std_q;
  j["theoretical_std"] = c.theoretical_std;
  j["rejection_rate"] = c.rejection_rate;
  j["q_values"] = c.q_values;
  j["warnings"] = c.warnings;
  return j;
}

inline void write_csv(std::ostream& out, const CalibrationReport& c) {
  out << "m,n,replicates,alpha,mean_q,std_q,theoretical_std,rejection_rate\n"
      << c.m << ',' << c.n << ',' << c.replicates << ',' << fmt(c.alpha) << ','
      << fmt(c.mean_q) << ',' << fmt(c.std_q) << ',' << fmt(c.theoretical_std)
      << ',' << fmt(c.rejection_rate) << '\n';
}

inline void write_raw_csv(std::ostream& out, const CalibrationReport& c) {
  out << "replicate,q_hat,p_one_sided\n";
  for (std::size_t r = 0; r < c.q_values.size(); ++r)
    out << r << ',' << fmt(c.q_values[r]) << ',' << fmt(c.p_values[r]) << '\n';
}

}  // namespace ttedepth
