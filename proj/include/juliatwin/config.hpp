#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "juliatwin/funceq.hpp"
#include "juliatwin/io.hpp"
#include "juliatwin/julia.hpp"

namespace juliatwin {

struct Tolerances {
  double equality = 1e-9;    // float-mode coefficient comparison
  double hausdorff = 1e-3;   // same-Julia threshold
  double residual = 1e-8;    // periodic-point residual flag
  double fit = 1e-6;         // circle-fit residual
  double invariance = 1e-5;  // forward-image membership
};

struct Budgets {
  std::int64_t degree = kDefaultDegreeBudget;
  int max_m = 8;
  int max_k = 3;
  int n_max = 4;  // periods
};

struct OutputPaths {
  std::string out;  // empty: stdout
  std::string ppm;
  int ppm_width = 512;
};

/// Everything a run depends on. Reports embed the resolved value.
struct RunConfig {
  std::uint64_t seed = 7;
  std::size_t n_points = kDefaultSamplePoints;
  std::size_t compare_points = kDefaultComparePoints;
  int burn_in = kDefaultBurnIn;
  Tolerances tol;
  Budgets budgets;
  OutputPaths output;

  void validate() const {
    for (double t : {tol.equality, tol.hausdorff, tol.residual, tol.fit, tol.invariance})
      require(t > 0.0, ErrorKind::kInput, "tolerances must be positive");
    require(n_points >= 1 && compare_points >= 1 && burn_in >= 0, ErrorKind::kInput,
            "point counts must be >= 1 and burn_in >= 0");
    require(budgets.degree >= 1 && budgets.max_m >= 1 && budgets.max_k >= 1 && budgets.n_max >= 1,
            ErrorKind::kInput, "budgets must be >= 1");
    require(output.ppm_width >= 1, ErrorKind::kInput, "ppm width must be >= 1");
  }

  SearchOptions search_options() const {
    SearchOptions s;
    s.max_m = budgets.max_m;
    s.max_k = budgets.max_k;
    s.degree_budget = budgets.degree;
    return s;
  }
};

namespace detail {

template <class T>
void read_field(const Json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::kInput, std::string("config field '") + key + "' has the wrong type");
  }
}

inline void check_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  require(j.is_object(), ErrorKind::kInput, "config section '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    require(known, ErrorKind::kInput, "unknown config field '" + where + k + "'");
  }
}

}  // namespace detail

inline Json to_json(const RunConfig& c) {
  return Json{{"seed", c.seed},
              {"n_points", c.n_points},
              {"compare_points", c.compare_points},
              {"burn_in", c.burn_in},
              {"tolerances",
               {{"equality", c.tol.equality},
                {"hausdorff", c.tol.hausdorff},
                {"residual", c.tol.residual},
                {"fit", c.tol.fit},
                {"invariance", c.tol.invariance}}},
              {"budgets",
               {{"degree", c.budgets.degree},
                {"max_m", c.budgets.max_m},
                {"max_k", c.budgets.max_k},
                {"n_max", c.budgets.n_max}}},
              {"output", {{"out", c.output.out}, {"ppm", c.output.ppm}, {"ppm_width", c.output.ppm_width}}}};
}

/// Overlays the fields present in j onto c.
inline void apply_json(RunConfig& c, const Json& j) {
  detail::check_keys(j, {"seed", "n_points", "compare_points", "burn_in", "tolerances", "budgets", "output"}, "");
  detail::read_field(j, "seed", c.seed);
  detail::read_field(j, "n_points", c.n_points);
  detail::read_field(j, "compare_points", c.compare_points);
  detail::read_field(j, "burn_in", c.burn_in);
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    detail::check_keys(t, {"equality", "hausdorff", "residual", "fit", "invariance"}, "tolerances.");
    detail::read_field(t, "equality", c.tol.equality);
    detail::read_field(t, "hausdorff", c.tol.hausdorff);
    detail::read_field(t, "residual", c.tol.residual);
    detail::read_field(t, "fit", c.tol.fit);
    detail::read_field(t, "invariance", c.tol.invariance);
  }
  if (j.contains("budgets")) {
    const auto& b = j["budgets"];
    detail::check_keys(b, {"degree", "max_m", "max_k", "n_max"}, "budgets.");
    detail::read_field(b, "degree", c.budgets.degree);
    detail::read_field(b, "max_m", c.budgets.max_m);
    detail::read_field(b, "max_k", c.budgets.max_k);
    detail::read_field(b, "n_max", c.budgets.n_max);
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    detail::check_keys(o, {"out", "ppm", "ppm_width"}, "output.");
    detail::read_field(o, "out", c.output.out);
    detail::read_field(o, "ppm", c.output.ppm);
    detail::read_field(o, "ppm_width", c.output.ppm_width);
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kInput, "cannot open config file '" + path + "'");
  RunConfig c;
  try {
    apply_json(c, Json::parse(in));
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kInput, path + ": " + e.what());
  }
  return c;
}

}  // namespace juliatwin
