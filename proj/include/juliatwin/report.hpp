#pragma once

#include "juliatwin/config.hpp"
#include "juliatwin/geometry.hpp"
#include "juliatwin/localdyn.hpp"
#include "juliatwin/spectrum.hpp"

namespace juliatwin {

inline Json to_json(const MultiplierClass& c) {
  Json j{{"kind", to_string(c.kind)}};
  if (c.kind == PointClass::kRationallyIndifferent) j["q"] = c.q;
  return j;
}

inline Json to_json(const OrbitRecord& o) {
  Json pts = Json::array();
  for (const auto& p : o.points) pts.push_back(to_json(p));
  return Json{{"period", o.period},
              {"points", pts},
              {"multiplier", to_json(o.multiplier)},
              {"class", to_json(o.cls)},
              {"multiplicity", o.multiplicity},
              {"residual", o.residual},
              {"flagged", o.flagged}};
}

inline Json to_json(const Census& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    Json nr = Json::array();
    for (const auto& o : r.nonrepelling) nr.push_back(to_json(o));
    rows.push_back(Json{{"n", r.n},
                        {"superattracting", r.superattracting},
                        {"attracting", r.attracting},
                        {"repelling", r.repelling},
                        {"rationally_indifferent", r.rationally_indifferent},
                        {"irrationally_indifferent", r.irrationally_indifferent},
                        {"nonrepelling", nr}});
  }
  return Json{{"rows", rows}, {"stable", c.stable}};
}

inline Json to_json(const CriticalOrbitReport& r) {
  Json orbits = Json::array();
  for (const auto& o : r.orbits)
    orbits.push_back(Json{{"point", to_json(o.point)},
                          {"multiplicity", o.multiplicity},
                          {"in_julia", o.in_julia},
                          {"cloud_distance", o.cloud_distance},
                          {"status", to_string(o.status)},
                          {"preperiod", o.preperiod},
                          {"cycle_period", o.cycle_period},
                          {"cycle_multiplier", to_json(o.cycle_multiplier)}});
  Json j{{"orbits", orbits}};
  j["hypothesis_satisfied"] = r.hypothesis_satisfied ? Json(*r.hypothesis_satisfied) : Json(nullptr);
  return j;
}

inline Json to_json(const CloudMeta& m) {
  return Json{{"map_fingerprint", m.map_fingerprint},
              {"seed", m.seed},
              {"n_points", m.n_points},
              {"burn_in", m.burn_in},
              {"method", to_string(m.method)}};
}

inline Json to_json(const FunEqWitness& w) {
  return Json{{"k", w.k()}, {"exponents", w.exponents}, {"m", w.m}, {"certified", w.certified},
              {"word_degree", w.word_degree}};
}

inline Json to_json(const SearchResult& r) {
  Json j{{"witness", r.witness ? to_json(*r.witness) : Json(nullptr)},
         {"region", {{"max_m", r.region.max_m}, {"max_k", r.region.max_k}, {"degree_budget", r.region.degree_budget}}},
         {"candidates", r.candidates},
         {"pruned_by_degree", r.pruned_by_degree},
         {"pruned_by_budget", r.pruned_by_budget},
         {"rejected", r.rejected}};
  if (!r.log.empty()) {
    Json log = Json::array();
    for (const auto& e : r.log) {
      Json le{{"exponents", e.exponents}, {"m", e.m}, {"fate", to_string(e.fate)}};
      if (e.pruned_word_equal) le["pruned_word_equal"] = *e.pruned_word_equal;
      log.push_back(le);
    }
    j["log"] = log;
  }
  return j;
}

inline Json to_json(const ParabolicData& d) {
  return Json{{"p", d.p},
              {"alpha", to_json(d.alpha)},
              {"normalized", d.normalized},
              {"scale", to_json(d.scale)},
              {"residual_order", d.residual_order},
              {"b", to_json(d.b)}};
}

template <FieldScalar S>
Json to_json(const PowerSeries<S>& s) {
  Json c = Json::array();
  for (const auto& v : s.c) c.push_back(to_json(v));
  return Json{{"order", s.order}, {"coefficients", c}};
}

inline Json to_json(const TangentCone& t) {
  Json rungs = Json::array();
  for (const auto& r : t.rungs)
    rungs.push_back(Json{{"radius", r.radius}, {"count", r.count}, {"skipped", r.skipped}, {"modes", r.modes}});
  return Json{{"direction_count", t.directions.size()},
              {"directions", t.directions},
              {"persistence", t.persistence},
              {"skipped_rungs", t.skipped_rungs},
              {"rungs", rungs}};
}

inline Json to_json(const CircleFit& f) {
  return Json{{"A", f.A}, {"B", to_json(f.B)}, {"C", f.C}, {"rms_residual", f.rms_residual}, {"line", f.is_line()}};
}

inline Json to_json(const ArcReport& r) {
  return Json{{"verdict", to_string(r.verdict)},
              {"fit", to_json(r.fit)},
              {"largest_gap", r.largest_gap},
              {"second_gap", r.second_gap},
              {"expected_gap", r.expected_gap}};
}

inline Json to_json(const LaminationReport& r) {
  Json curves = Json::array();
  for (const auto& c : r.curves) curves.push_back(Json{{"points", c.points}, {"rms", c.rms}, {"branches", c.branches}});
  return Json{{"laminated", r.laminated},
              {"curve_count", r.curve_count},
              {"rms", r.rms},
              {"link_radius", r.link_radius},
              {"curves", curves}};
}

inline Json to_json(const PairClassification& c) {
  Json j{{"verdict", to_string(c.verdict)},
         {"same_julia",
          {{"verdict", c.same.verdict},
           {"distance", c.same.distance},
           {"cloud_f", to_json(c.same.cloud_f.meta)},
           {"cloud_g", to_json(c.same.cloud_g.meta)}}}};
  if (c.verdict != PairVerdict::kDifferentJulia) j["shape"] = to_json(c.shape);
  if (c.search) j["search"] = to_json(*c.search);
  if (c.verdict == PairVerdict::kCondition1) j["condition_1"] = to_string(c.shape.verdict);
  if (c.verdict == PairVerdict::kCondition2) j["condition_2"] = to_json(*c.search->witness);
  return j;
}

}  // namespace juliatwin
