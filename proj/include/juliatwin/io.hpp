#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "juliatwin/ratmap.hpp"

namespace juliatwin {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Shorthand expressions: "z^2 - 2", "(z^2 - 1)/z", "2z^3 + i z", "1/3 z^2"

namespace detail {

struct Fraction {
  Poly<GaussRational> num, den;
};

inline Fraction frac_mul(const Fraction& a, const Fraction& b) { return {a.num * b.num, a.den * b.den}; }

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  Fraction parse() {
    Fraction f = expr();
    skip_space();
    require(pos_ == s_.size(), ErrorKind::kInput, error_at("unexpected character"));
    return f;
  }

 private:
  std::string error_at(const std::string& what) const {
    return what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'";
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip_space();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool starts_atom() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'z' || c == 'i' || c == '(';
  }

  Fraction expr() {
    Fraction acc = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return acc;
      ++pos_;
      Fraction t = term();
      if (c == '-') t.num = -t.num;
      acc = {acc.num * t.den + t.num * acc.den, acc.den * t.den};
    }
  }

  Fraction term() {
    Fraction acc = unary();
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        acc = frac_mul(acc, unary());
      } else if (c == '/') {
        ++pos_;
        Fraction d = unary();
        require(!d.num.is_zero(), ErrorKind::kInput, error_at("division by zero"));
        acc = frac_mul(acc, {d.den, d.num});
      } else if (starts_atom()) {
        acc = frac_mul(acc, power());
      } else {
        return acc;
      }
    }
  }

  Fraction unary() {
    const char c = peek();
    if (c == '-' || c == '+') {
      ++pos_;
      Fraction f = unary();
      if (c == '-') f.num = -f.num;
      return f;
    }
    return power();
  }

  Fraction power() {
    Fraction base = atom();
    if (peek() != '^') return base;
    ++pos_;
    skip_space();
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    require(pos_ > start && pos_ - start <= 4 && (pos_ == s_.size() || s_[pos_] != '.'), ErrorKind::kInput,
            error_at("expected a small integer exponent"));
    const int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
    Fraction r{Poly<GaussRational>::constant(1), Poly<GaussRational>::constant(1)};
    for (int k = 0; k < e; ++k) r = frac_mul(r, base);
    if (neg) {
      require(!r.num.is_zero(), ErrorKind::kInput, error_at("zero to a negative power"));
      std::swap(r.num, r.den);
    }
    return r;
  }

  Fraction atom() {
    const char c = peek();
    const auto one = Poly<GaussRational>::constant(1);
    if (c == 'z') {
      ++pos_;
      return {Poly<GaussRational>::identity(), one};
    }
    if (c == 'i') {
      ++pos_;
      return {Poly<GaussRational>::constant(GaussRational(0, 1)), one};
    }
    if (c == '(') {
      ++pos_;
      Fraction f = expr();
      require(peek() == ')', ErrorKind::kInput, error_at("expected ')'"));
      ++pos_;
      return f;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ + 1 < s_.size() &&
        (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '-' || s_[pos_ + 1] == '+')) {
      pos_ += 2;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    require(pos_ > start, ErrorKind::kInput, error_at("expected a number, z, i or '('"));
    return {Poly<GaussRational>::constant(GaussRational(parse_rational(s_.substr(start, pos_ - start)))), one};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Rational map from a shorthand expression in z (exact coefficients).
inline RatMap<GaussRational> parse_map_expression(std::string_view text) {
  const auto f = detail::ExprParser(text).parse();
  require(!f.den.is_zero(), ErrorKind::kInput, "expression has a zero denominator");
  return RatMap<GaussRational>::make(f.num, f.den);
}

/// A constant such as "1/2 - 3i" or "0+0i".
inline GaussRational parse_constant(std::string_view text) {
  const auto f = detail::ExprParser(text).parse();
  require(f.num.degree() <= 0 && f.den.degree() == 0, ErrorKind::kInput,
          "'" + std::string(text) + "' is not a constant");
  return f.num.is_zero() ? GaussRational(0) : f.num[0] / f.den[0];
}

// ---------------------------------------------------------------------------
// Map literals

/// A map as read from a file: the mode decides which member is set.
struct MapLiteral {
  Mode mode = Mode::kExact;
  RatMap<GaussRational> exact = RatMap<GaussRational>::identity();
  RatMap<Complex> flt = RatMap<Complex>::identity();

  /// Calls fn with the map of the literal's mode.
  template <class F>
  decltype(auto) visit(F&& fn) const {
    if (mode == Mode::kExact) return fn(exact);
    return fn(flt);
  }
};

namespace detail {

inline mpq_class json_rational(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_number_float()) {
    // Doubles are binary fractions, so this conversion is exact.
    mpq_class q(v.get<double>());
    return q;
  }
  fail(ErrorKind::kInput, "coefficient part must be a string \"p/q\" or a number");
}

inline Poly<GaussRational> json_poly(const Json& arr, const char* key) {
  require(arr.is_array() && !arr.empty(), ErrorKind::kInput, std::string("map field '") + key + "' must be a non-empty array");
  std::vector<GaussRational> c;
  for (const auto& e : arr) {
    if (e.is_array()) {
      require(e.size() == 2, ErrorKind::kInput, std::string("coefficient in '") + key + "' must be [re, im]");
      c.emplace_back(json_rational(e[0]), json_rational(e[1]));
    } else {
      c.emplace_back(json_rational(e));
    }
  }
  return Poly<GaussRational>(std::move(c));
}

}  // namespace detail

/// {"num": [[re, im], ...], "den": [...], "mode": "exact" | "float"}, a bare
/// shorthand string, or {"expr": "...", "mode": ...}.
inline MapLiteral map_from_json(const Json& j) {
  MapLiteral lit;
  RatMap<GaussRational> f = RatMap<GaussRational>::identity();
  if (j.is_string()) {
    f = parse_map_expression(j.get<std::string>());
  } else {
    require(j.is_object(), ErrorKind::kInput, "map literal must be an object or an expression string");
    for (const auto& [k, v] : j.items())
      require(k == "num" || k == "den" || k == "mode" || k == "expr" || k == "name", ErrorKind::kInput,
              "unknown map field '" + k + "'");
    if (j.contains("mode")) {
      require(j["mode"].is_string(), ErrorKind::kInput, "map mode must be a string");
      const auto m = j["mode"].get<std::string>();
      require(m == "exact" || m == "float", ErrorKind::kInput, "map mode must be 'exact' or 'float', got '" + m + "'");
      lit.mode = m == "exact" ? Mode::kExact : Mode::kFloat;
    }
    if (j.contains("expr")) {
      require(!j.contains("num") && !j.contains("den"), ErrorKind::kInput, "give either 'expr' or 'num'/'den'");
      require(j["expr"].is_string(), ErrorKind::kInput, "map 'expr' must be a string");
      f = parse_map_expression(j["expr"].get<std::string>());
    } else {
      require(j.contains("num"), ErrorKind::kInput, "map literal needs 'num'");
      const auto num = detail::json_poly(j["num"], "num");
      const auto den = j.contains("den") ? detail::json_poly(j["den"], "den") : Poly<GaussRational>::constant(1);
      require(!den.is_zero(), ErrorKind::kInput, "map denominator is zero");
      f = RatMap<GaussRational>::make(num, den);
    }
  }
  lit.exact = f;
  if (lit.mode == Mode::kFloat) lit.flt = to_float(f);
  return lit;
}

inline MapLiteral parse_map_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[' || text[first] == '"'))
      fail(ErrorKind::kInput, std::string("malformed JSON: ") + e.what());
    // Not JSON: the whole file is a shorthand expression.
    return map_from_json(Json(text));
  }
  return map_from_json(j);
}

inline MapLiteral load_map(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kInput, "cannot open map file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_map_text(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON of library values

inline Json to_json(const Complex& c) { return Json::array({c.real(), c.imag()}); }

inline Json to_json(const GaussRational& q) {
  return Json::array({rational_to_string(q.re()), rational_to_string(q.im())});
}

inline Json to_json(const SpherePoint& p) {
  if (p.is_infinite()) return Json("inf");
  return to_json(p.value());
}

template <FieldScalar S>
Json to_json(const Poly<S>& p) {
  Json a = Json::array();
  for (const auto& c : p.coeffs()) a.push_back(to_json(c));
  if (p.is_zero()) a.push_back(to_json(S(0)));
  return a;
}

template <FieldScalar S>
Json map_to_json(const RatMap<S>& f) {
  return Json{{"num", to_json(f.num())}, {"den", to_json(f.den())}, {"mode", to_string(mode_of<S>)}};
}

}  // namespace juliatwin
