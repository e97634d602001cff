#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "juliatwin/juliatwin.hpp"

using namespace juliatwin;

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_points;
  std::optional<int> burn_in;
  std::optional<double> tol_equality, tol_hausdorff, tol_residual, tol_fit, tol_invariance;
  std::optional<std::int64_t> max_degree;
  std::optional<int> max_m, max_k, max_period;
  std::optional<std::string> out;
};

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
  if (f.seed) c.seed = *f.seed;
  if (f.n_points) c.n_points = c.compare_points = *f.n_points;
  if (f.burn_in) c.burn_in = *f.burn_in;
  if (f.tol_equality) c.tol.equality = *f.tol_equality;
  if (f.tol_hausdorff) c.tol.hausdorff = *f.tol_hausdorff;
  if (f.tol_residual) c.tol.residual = *f.tol_residual;
  if (f.tol_fit) c.tol.fit = *f.tol_fit;
  if (f.tol_invariance) c.tol.invariance = *f.tol_invariance;
  if (f.max_degree) c.budgets.degree = *f.max_degree;
  if (f.max_m) c.budgets.max_m = *f.max_m;
  if (f.max_k) c.budgets.max_k = *f.max_k;
  if (f.max_period) c.budgets.n_max = *f.max_period;
  if (f.out) c.output.out = *f.out;
  c.validate();
  return c;
}

void emit(const RunConfig& c, const std::string& command, Json body) {
  Json report{{"command", command}, {"config", to_json(c)}};
  for (auto& [k, v] : body.items()) report[k] = std::move(v);
  const std::string text = report.dump(2) + "\n";
  if (c.output.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(c.output.out, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::kInput, "cannot write '" + c.output.out + "'");
  os << text;
}

// Both maps of a pair command in the same mode; no silent promotion.
template <class F>
void with_pair(const MapLiteral& a, const MapLiteral& b, F&& fn) {
  require(a.mode == b.mode, ErrorKind::kInput, "maps have different modes (exact vs float)");
  if (a.mode == Mode::kExact) fn(a.exact, b.exact);
  else fn(a.flt, b.flt);
}

std::optional<GaussRational> parse_exact_point(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::nullopt;
  return parse_constant(text);
}

void write_ppm_file(const std::string& path, const PointCloud& cloud, int width) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::kInput, "cannot write '" + path + "'");
  write_cloud_ppm(os, cloud, width);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"juliatwin: rational maps with a common Julia set"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags fl;
  app.add_option("--config", fl.config_path, "JSON run configuration; flags override it")->check(CLI::ExistingFile);
  app.add_option("--seed", fl.seed, "random seed");
  app.add_option("-n,--points", fl.n_points, "number of sampled points");
  app.add_option("--burn-in", fl.burn_in, "discarded backward steps per chain");
  app.add_option("--tol-equality", fl.tol_equality, "float coefficient equality tolerance");
  app.add_option("--tol,--tol-hausdorff", fl.tol_hausdorff, "same-Julia Hausdorff tolerance");
  app.add_option("--tol-residual", fl.tol_residual, "periodic point residual flag");
  app.add_option("--tol-fit", fl.tol_fit, "circle fit residual tolerance");
  app.add_option("--tol-invariance", fl.tol_invariance, "forward-image membership tolerance");
  app.add_option("--max-degree", fl.max_degree, "degree budget for compositions");
  app.add_option("--max-m", fl.max_m, "functional equation search bound on m");
  app.add_option("--max-k", fl.max_k, "functional equation search bound on k");
  app.add_option("--max-period", fl.max_period, "largest period for census reports");
  app.add_option("--out", fl.out, "write the JSON report here instead of stdout");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "periodic orbits of period dividing n");
  std::string a_map;
  int a_periods = 1;
  bool a_census = false, a_critical = false;
  analyze->add_option("map", a_map, "map file")->required();
  analyze->add_option("--periods", a_periods, "n: report orbits whose period divides n")->check(CLI::PositiveNumber);
  analyze->add_flag("--census", a_census, "non-repelling census for periods 1..max-period");
  analyze->add_flag("--critical", a_critical, "critical orbit statuses against a sampled Julia cloud");

  // julia-sample
  auto* sample = app.add_subcommand("julia-sample", "sample the Julia set by inverse iteration");
  std::string s_map, s_csv;
  std::optional<std::string> s_ppm;
  std::optional<int> s_width;
  sample->add_option("map", s_map, "map file")->required();
  sample->add_option("-o,--csv", s_csv, "cloud CSV output (stdout when omitted)");
  sample->add_option("--ppm", s_ppm, "raster output (P6)");
  sample->add_option("--ppm-width", s_width, "raster width in pixels")->check(CLI::PositiveNumber);

  // compare
  auto* compare = app.add_subcommand("compare", "numerical same-Julia test");
  std::string c_f, c_g;
  compare->add_option("f", c_f, "first map")->required();
  compare->add_option("g", c_g, "second map")->required();

  // funceq-search
  auto* search = app.add_subcommand("funceq-search", "search f^m1 g ... f^mk g = f^m");
  std::string q_f, q_g;
  bool q_log = false;
  search->add_option("f", q_f, "first map")->required();
  search->add_option("g", q_g, "second map")->required();
  search->add_flag("--log", q_log, "include every candidate and its fate");

  // localdyn
  auto* local = app.add_subcommand("localdyn", "Koenigs series or parabolic data at a fixed point");
  std::string l_map, l_point = "0", l_mode = "koenigs";
  int l_order = kDefaultSeriesOrder, l_samples = 8, l_iter = 10000;
  local->add_option("map", l_map, "map file")->required();
  local->add_option("--fixed-point", l_point, "fixed point, e.g. \"0+0i\", \"1/2 - i\" or \"inf\"");
  local->add_option("--mode", l_mode, "koenigs | parabolic")->check(CLI::IsMember({"koenigs", "parabolic"}));
  local->add_option("--order", l_order, "series truncation order")->check(CLI::Range(2, 200));
  local->add_option("--fatou-samples", l_samples, "Fatou coordinate samples per petal")->check(CLI::Range(0, 10000));
  local->add_option("--n-iter", l_iter, "iterations for the Fatou coordinate")->check(CLI::Range(1, 10000000));

  // tangent-cone
  auto* cone = app.add_subcommand("tangent-cone", "tangent directions of a Julia cloud at a point");
  std::string t_map, t_cloud, t_point = "0";
  double t_rmax = 0.2, t_bin = kDefaultBinWidth;
  int t_rungs = 8;
  cone->add_option("map", t_map, "map file (sampled unless --cloud is given)");
  cone->add_option("--cloud", t_cloud, "cloud CSV instead of sampling")->check(CLI::ExistingFile);
  cone->add_option("--z0", t_point, "base point on the cloud");
  cone->add_option("--r-max", t_rmax, "largest annulus radius")->check(CLI::PositiveNumber);
  cone->add_option("--rungs", t_rungs, "number of halvings")->check(CLI::Range(1, 60));
  cone->add_option("--bin-width", t_bin, "histogram bin width (radians)")->check(CLI::PositiveNumber);

  // classify-pair
  auto* classify = app.add_subcommand("classify-pair", "circle/arc test, then functional equation search");
  std::string k_f, k_g;
  classify->add_option("f", k_f, "first map")->required();
  classify->add_option("g", k_g, "second map")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorKind::kInput);
  }

  try {
    RunConfig cfg = resolve(fl);
    if (*analyze) {
      const auto lit = load_map(a_map);
      lit.visit([&](const auto& f) {
        Json orbits = Json::array();
        for (const auto& o : periodic_points(f, a_periods, cfg.budgets.degree + 1)) orbits.push_back(to_json(o));
        Json body{{"map", map_to_json(f)}, {"periods", a_periods}, {"orbits", orbits}};
        if (a_census) body["census"] = to_json(nonrepelling_census(f, cfg.budgets.n_max, cfg.budgets.degree + 1));
        if (a_critical) {
          const auto cloud = inverse_iteration_sample(f, cfg.n_points, cfg.burn_in, cfg.seed);
          body["critical"] = to_json(critical_orbit_report(f, cloud, 200, cfg.tol.hausdorff));
        }
        emit(cfg, "analyze", body);
      });
    } else if (*sample) {
      const auto lit = load_map(s_map);
      lit.visit([&](const auto& f) {
        const auto cloud = inverse_iteration_sample(f, cfg.n_points, cfg.burn_in, cfg.seed);
        if (s_ppm) cfg.output.ppm = *s_ppm;
        if (s_width) cfg.output.ppm_width = *s_width;
        cfg.validate();
        if (!cfg.output.ppm.empty()) write_ppm_file(cfg.output.ppm, cloud, cfg.output.ppm_width);
        if (s_csv.empty()) {
          write_cloud_csv(std::cout, cloud);
          return;
        }
        std::ofstream os(s_csv);
        require(static_cast<bool>(os), ErrorKind::kInput, "cannot write '" + s_csv + "'");
        write_cloud_csv(os, cloud);
        emit(cfg, "julia-sample",
             Json{{"map", map_to_json(f)},
                  {"cloud", to_json(cloud.meta)},
                  {"csv", s_csv},
                  {"forward_invariance", forward_invariance_fraction(f, cloud, cfg.tol.invariance)}});
      });
    } else if (*compare) {
      if (!fl.n_points) cfg.n_points = cfg.compare_points;
      with_pair(load_map(c_f), load_map(c_g), [&](const auto& f, const auto& g) {
        const auto r = same_julia_test(f, g, cfg.compare_points, cfg.seed, cfg.tol.hausdorff);
        emit(cfg, "compare",
             Json{{"f", map_to_json(f)},
                  {"g", map_to_json(g)},
                  {"same_julia", r.verdict},
                  {"distance", r.distance},
                  {"tolerance", cfg.tol.hausdorff},
                  {"cloud_f", to_json(r.cloud_f.meta)},
                  {"cloud_g", to_json(r.cloud_g.meta)}});
      });
    } else if (*search) {
      with_pair(load_map(q_f), load_map(q_g), [&](const auto& f, const auto& g) {
        auto opt = cfg.search_options();
        opt.keep_log = q_log;
        const auto r = search_functional_equation(f, g, opt);
        emit(cfg, "funceq-search", Json{{"f", map_to_json(f)}, {"g", map_to_json(g)}, {"result", to_json(r)}});
      });
    } else if (*local) {
      const auto lit = load_map(l_map);
      const auto at_value = parse_exact_point(l_point);
      lit.visit([&](const auto& f) {
        using S = typename std::decay_t<decltype(f)>::Scalar;
        FixedPoint<S> at;
        at.infinite = !at_value;
        if (at_value) {
          if constexpr (std::is_same_v<S, GaussRational>) at.value = *at_value;
          else at.value = to_complex(*at_value);
        }
        Json body{{"map", map_to_json(f)}, {"fixed_point", to_json(at.sphere())}, {"mode", l_mode}};
        if (l_mode == "koenigs") {
          const auto lin = koenigs_series(f, at, l_order);
          body["lambda"] = to_json(lin.lambda);
          body["phi"] = to_json(lin.phi);
          body["radius"] = lin.radius;
          const double r0 = conjugacy_radius(lin);
          body["conjugacy_radius"] = r0;
          body["conjugacy_residual"] = conjugacy_residual(f, lin, r0);
        } else {
          const auto d = parabolic_data(f, at, l_order);
          const auto g = normalize_alpha(f, at, d);
          const double a = select_petal_a(g, d.p, 1000, cfg.seed);
          body["parabolic"] = to_json(d);
          body["petal_a"] = a;
          std::mt19937_64 rng(cfg.seed);
          std::uniform_real_distribution<double> re(100.0, 200.0), im(-100.0, 100.0);
          Json petals = Json::array();
          for (int k = 0; k < d.p; ++k) {
            Json samples = Json::array();
            for (int i = 0; i < l_samples; ++i) {
              const Complex w(re(rng), im(rng));
              const auto u = fatou_coordinate(g, d, k, w, l_iter);
              const auto uv = fatou_coordinate(g, d, k, petal_map(g, d.p, k, w), l_iter);
              samples.push_back(Json{{"w", to_json(w)},
                                     {"u", to_json(u.u)},
                                     {"error_estimate", u.error_estimate},
                                     {"abel_residual", std::abs(uv.u - u.u - static_cast<double>(d.p))}});
            }
            petals.push_back(Json{{"k", k}, {"log_corrected", d.residual_order >= 2 * d.p + 1}, {"samples", samples}});
          }
          body["fatou"] = petals;
        }
        emit(cfg, "localdyn", body);
      });
    } else if (*cone) {
      PointCloud cloud;
      Json source;
      if (!t_cloud.empty()) {
        std::ifstream in(t_cloud);
        cloud = read_cloud_csv(in);
        source = Json{{"csv", t_cloud}};
      } else {
        require(!t_map.empty(), ErrorKind::kInput, "tangent-cone needs a map or --cloud");
        load_map(t_map).visit([&](const auto& f) {
          cloud = inverse_iteration_sample(f, cfg.n_points, cfg.burn_in, cfg.seed);
          source = Json{{"map", map_to_json(f)}, {"cloud", to_json(cloud.meta)}};
        });
      }
      ConeOptions opt;
      opt.bin_width = t_bin;
      const Complex z0 = to_complex(parse_constant(t_point));
      const auto tc = tangent_cone_directions(cloud, z0, radius_ladder(t_rmax, t_rungs), opt);
      emit(cfg, "tangent-cone",
           Json{{"source", source}, {"z0", to_json(z0)}, {"bin_width", t_bin}, {"cone", to_json(tc)}});
    } else if (*classify) {
      with_pair(load_map(k_f), load_map(k_g), [&](const auto& f, const auto& g) {
        ClassifyOptions opt;
        opt.n_points = cfg.compare_points;
        opt.seed = cfg.seed;
        opt.hausdorff_tol = cfg.tol.hausdorff;
        opt.fit_tol = cfg.tol.fit;
        opt.search = cfg.search_options();
        emit(cfg, "classify-pair",
             Json{{"f", map_to_json(f)}, {"g", map_to_json(g)}, {"classification", to_json(classify_pair(f, g, opt))}});
      });
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
