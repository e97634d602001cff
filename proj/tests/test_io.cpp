#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "juliatwin/config.hpp"
#include "juliatwin/io.hpp"

using namespace juliatwin;
using Q = GaussRational;
using ExactMap = RatMap<Q>;

namespace {

Poly<Q> zpoly(std::initializer_list<Q> c) { return Poly<Q>(std::vector<Q>(c)); }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no juliatwin::Error thrown";
  return ErrorKind::kDomain;
}

}  // namespace

TEST(Expression, Polynomials) {
  EXPECT_EQ(parse_map_expression("z^2 - 2"), ExactMap::polynomial(zpoly({Q(-2), Q(0), Q(1)})));
  EXPECT_EQ(parse_map_expression("2z^3+i z"), ExactMap::polynomial(zpoly({Q(0), Q(0, 1), Q(0), Q(2)})));
  EXPECT_EQ(parse_map_expression("1/3 z^2"), ExactMap::polynomial(zpoly({Q(0), Q(0), Q(mpq_class(1, 3))})));
  EXPECT_EQ(parse_map_expression("-(z+1)^2 + 0.5"), ExactMap::polynomial(zpoly({Q(mpq_class(-1, 2)), Q(-2), Q(-1)})));
  EXPECT_EQ(parse_map_expression("z*z*z"), parse_map_expression("z^3"));
}

TEST(Expression, Quotients) {
  const auto f = parse_map_expression("(z^2 - 1)/z");
  EXPECT_EQ(f, ExactMap::make(zpoly({Q(-1), Q(0), Q(1)}), zpoly({Q(0), Q(1)})));
  EXPECT_EQ(parse_map_expression("z^-2"), parse_map_expression("1/z^2"));
  EXPECT_EQ(parse_map_expression("z^2/(2z+1)").degree(), 2);
}

TEST(Expression, Constants) {
  EXPECT_EQ(parse_constant("0+0i"), Q(0));
  EXPECT_EQ(parse_constant("1/2 - 3i"), Q(mpq_class(1, 2), mpq_class(-3)));
  EXPECT_EQ(parse_constant("(1+i)^2"), Q(0, 2));
  EXPECT_EQ(kind_of([] { parse_constant("z"); }), ErrorKind::kInput);
}

TEST(Expression, Malformed) {
  for (const char* bad : {"", "z^", "(z+1", "z + * 2", "z^2.5", "1/0", "w^2", "z^99999"})
    EXPECT_EQ(kind_of([&] { parse_map_expression(bad); }), ErrorKind::kInput) << bad;
}

TEST(MapJson, ExactRoundTrip) {
  for (const char* text : {"z^2 + i", "(z^2 - 1/3)/(2z + i)", "4z^3 - 3z", "z^2/(2z+1)"}) {
    const auto f = parse_map_expression(text);
    const auto back = map_from_json(map_to_json(f));
    EXPECT_EQ(back.mode, Mode::kExact);
    EXPECT_EQ(back.exact, f) << text;
  }
}

TEST(MapJson, FormsAgree) {
  const auto a = parse_map_text(R"({"num": [[0,0],[0,0],[1,0]], "den": [[1,0]]})");
  const auto b = parse_map_text(R"({"num": ["0", 0, "1/1"], "mode": "exact"})");
  const auto c = parse_map_text(R"({"expr": "z^2", "name": "square"})");
  const auto d = parse_map_text("z^2\n");
  EXPECT_EQ(a.exact, b.exact);
  EXPECT_EQ(a.exact, c.exact);
  EXPECT_EQ(a.exact, d.exact);
}

TEST(MapJson, FloatMode) {
  const auto lit = parse_map_text(R"({"num": [[0.5,0],[0,0],[1,0]], "mode": "float"})");
  ASSERT_EQ(lit.mode, Mode::kFloat);
  EXPECT_EQ(lit.flt.num()[0], Complex(0.5, 0.0));
  EXPECT_EQ(lit.flt.num()[2], Complex(1.0, 0.0));
  EXPECT_EQ(lit.visit([](const auto& f) { return f.degree(); }), 2);
}

TEST(MapJson, Rejects) {
  for (const char* bad : {R"({"num": [1, 2], "mode": "double"})", R"({"num": []})", R"({"num": [[1]]})",
                          R"({"num": [1, 2], "den": [0]})", R"({"num": [1, 2], "extra": 1})",
                          R"({"num": [1,)", R"({"expr": "z^2", "num": [1]})", R"({"num": [true]})", "[1, 2]"})
    EXPECT_EQ(kind_of([&] { parse_map_text(bad); }), ErrorKind::kInput) << bad;
  EXPECT_EQ(kind_of([] { load_map("/nonexistent/map.json"); }), ErrorKind::kInput);
}

TEST(Config, DefaultsSerialiseAndReload) {
  RunConfig c;
  c.seed = 11;
  c.tol.hausdorff = 2e-3;
  c.budgets.max_m = 5;
  RunConfig d;
  apply_json(d, to_json(c));
  EXPECT_EQ(to_json(d), to_json(c));
  EXPECT_EQ(d.seed, 11u);
  EXPECT_EQ(d.budgets.max_m, 5);
  EXPECT_EQ(d.search_options().max_m, 5);
}

TEST(Config, PartialOverlay) {
  RunConfig c;
  apply_json(c, Json::parse(R"({"tolerances": {"fit": 1e-4}})"));
  EXPECT_EQ(c.tol.fit, 1e-4);
  EXPECT_EQ(c.tol.hausdorff, RunConfig{}.tol.hausdorff);
}

TEST(Config, Rejects) {
  RunConfig c;
  EXPECT_EQ(kind_of([&] { apply_json(c, Json::parse(R"({"sed": 1})")); }), ErrorKind::kInput);
  EXPECT_EQ(kind_of([&] { apply_json(c, Json::parse(R"({"budgets": {"max_q": 1}})")); }), ErrorKind::kInput);
  EXPECT_EQ(kind_of([&] { apply_json(c, Json::parse(R"({"seed": "seven"})")); }), ErrorKind::kInput);
  RunConfig bad;
  bad.tol.fit = 0.0;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::kInput);
  const std::string path = ::testing::TempDir() + "juliatwin_bad_config.json";
  std::ofstream(path) << "{ not json";
  EXPECT_EQ(kind_of([&] { load_config(path); }), ErrorKind::kInput);
  std::remove(path.c_str());
}
