#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "juliatwin/ratmap.hpp"

namespace juliatwin {

/// f^{m_1} g f^{m_2} g ... f^{m_k} g = f^m.
struct FunEqWitness {
  std::vector<int> exponents;  // m_1 .. m_k
  int m = 1;
  bool certified = false;
  std::int64_t word_degree = 0;

  int k() const { return static_cast<int>(exponents.size()); }
  friend bool operator==(const FunEqWitness&, const FunEqWitness&) = default;
};

/// f^{m_1} o g o f^{m_2} o g o ... o f^{m_k} o g.
template <FieldScalar S>
RatMap<S> compose_word(const RatMap<S>& f, const RatMap<S>& g, const std::vector<int>& exponents,
                       std::int64_t budget = kDefaultDegreeBudget) {
  require(!exponents.empty(), ErrorKind::kInput, "compose_word needs at least one exponent");
  int total = 0;
  for (int e : exponents) {
    require(e >= 0, ErrorKind::kInput, "negative exponent in compose_word");
    total += e;
  }
  const std::int64_t dg = checked_power(g.degree(), static_cast<int>(exponents.size()), budget);
  const std::int64_t df = checked_power(f.degree(), total, budget);
  require(dg <= budget && df <= budget / dg, ErrorKind::kBudget,
          "word degree exceeds budget " + std::to_string(budget));
  RatMap<S> r = RatMap<S>::identity();
  for (auto it = exponents.rbegin(); it != exponents.rend(); ++it) {
    r = compose(g, r, budget);
    if (*it > 0) r = compose(iterate(f, *it, budget), r, budget);
  }
  return r;
}

/// f o g == g o f.
template <FieldScalar S>
bool commute_check(const RatMap<S>& f, const RatMap<S>& g,
                   std::int64_t budget = kDefaultDegreeBudget) {
  return maps_equal(compose(f, g, budget), compose(g, f, budget));
}

enum class CandidateFate { kDegreeMismatch, kOverBudget, kNotEqual, kCertified };

inline const char* to_string(CandidateFate c) {
  switch (c) {
    case CandidateFate::kDegreeMismatch: return "degree_mismatch";
    case CandidateFate::kOverBudget: return "over_budget";
    case CandidateFate::kNotEqual: return "not_equal";
    case CandidateFate::kCertified: return "certified";
  }
  return "?";
}

struct SearchLogEntry {
  std::vector<int> exponents;
  int m = 0;
  CandidateFate fate = CandidateFate::kDegreeMismatch;
  // Set only when SearchOptions::verify_pruned built a degree-pruned word anyway.
  std::optional<bool> pruned_word_equal;
};

struct SearchOptions {
  int max_m = 8;
  int max_k = 3;
  std::int64_t degree_budget = kDefaultDegreeBudget;
  bool keep_log = false;
  // Builds degree-pruned words that fit the budget and records whether they
  // equal f^m. Used to audit the pruning rule.
  bool verify_pruned = false;
};

struct SearchResult {
  std::optional<FunEqWitness> witness;
  SearchOptions region;
  std::int64_t candidates = 0;
  std::int64_t pruned_by_degree = 0;
  std::int64_t pruned_by_budget = 0;
  std::int64_t rejected = 0;  // degree identity held but maps differ
  std::vector<SearchLogEntry> log;
};

namespace detail {

// Calls visit(tuple) for every k-tuple of non-negative integers with sum <= cap,
// in lexicographic order. Stops early when visit returns true.
template <class Visit>
bool for_each_tuple(int k, int cap, std::vector<int>& cur, Visit&& visit) {
  if (static_cast<int>(cur.size()) == k) return visit(cur);
  for (int v = 0; v <= cap; ++v) {
    cur.push_back(v);
    const bool stop = for_each_tuple(k, cap - v, cur, visit);
    cur.pop_back();
    if (stop) return true;
  }
  return false;
}

inline mpz_class mpz_pow(long base, long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(e));
  return r;
}

}  // namespace detail

/// Bounded search for the smallest witness in the order (m, k, tuple). Words are
/// only built when d_f^{sum m_i} d_g^k = d_f^m holds; equality is certified exactly.
/// Float maps are snapped to Q(i) first and rejected if that fails.
template <FieldScalar S>
SearchResult search_functional_equation(const RatMap<S>& f_in, const RatMap<S>& g_in,
                                        const SearchOptions& opt = {}) {
  require(opt.max_m >= 1 && opt.max_k >= 1 && opt.degree_budget >= 1, ErrorKind::kInput,
          "search budgets must be >= 1");
  const RatMap<GaussRational> f = rationalize(f_in);
  const RatMap<GaussRational> g = rationalize(g_in);
  require(f.degree() >= 2 && g.degree() >= 2, ErrorKind::kInput, "funceq search needs degrees >= 2");

  SearchResult res;
  res.region = opt;
  const long df = f.degree(), dg = g.degree();
  std::map<int, RatMap<GaussRational>> f_iter;
  auto f_pow = [&](int j) -> const RatMap<GaussRational>& {
    auto it = f_iter.find(j);
    if (it == f_iter.end()) it = f_iter.emplace(j, iterate(f, j, opt.degree_budget)).first;
    return it->second;
  };

  for (int m = 1; m <= opt.max_m && !res.witness; ++m) {
    const mpz_class rhs = detail::mpz_pow(df, m);
    const bool target_fits = rhs <= opt.degree_budget;
    for (int k = 1; k <= opt.max_k && !res.witness; ++k) {
      std::vector<int> cur;
      detail::for_each_tuple(k, m, cur, [&](const std::vector<int>& tuple) {
        ++res.candidates;
        int sum = 0;
        for (int e : tuple) sum += e;
        SearchLogEntry entry{tuple, m, CandidateFate::kDegreeMismatch, std::nullopt};
        const mpz_class lhs = detail::mpz_pow(df, sum) * detail::mpz_pow(dg, k);
        bool stop = false;
        if (lhs != rhs) {
          ++res.pruned_by_degree;
          if (opt.verify_pruned && lhs <= opt.degree_budget && target_fits)
            entry.pruned_word_equal = maps_equal(compose_word(f, g, tuple, opt.degree_budget), f_pow(m));
        } else if (!target_fits) {
          ++res.pruned_by_budget;
          entry.fate = CandidateFate::kOverBudget;
        } else if (maps_equal(compose_word(f, g, tuple, opt.degree_budget), f_pow(m))) {
          entry.fate = CandidateFate::kCertified;
          res.witness = FunEqWitness{tuple, m, true, rhs.get_si()};
          stop = true;
        } else {
          ++res.rejected;
          entry.fate = CandidateFate::kNotEqual;
        }
        if (opt.keep_log) res.log.push_back(std::move(entry));
        return stop;
      });
    }
  }
  return res;
}

}  // namespace juliatwin
