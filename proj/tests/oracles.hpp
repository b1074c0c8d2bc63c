// Independent reference implementations used only by the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fcgec/model.hpp"
#include "fcgec/stg.hpp"
#include "fcgec/text.hpp"

namespace oracle {

using fcgec::Chars;
using fcgec::Reference;
using fcgec::Sentence;

inline Sentence S(const char* utf8) { return Sentence::from_utf8(utf8); }
inline Chars C(const char* utf8) { return fcgec::decode_utf8(utf8); }

// Each original character owns a body (itself, nothing, or a modify label)
// and a suffix of inserted text; the output visits characters in switch order.
inline Sentence naive_apply(const Sentence& s, const Reference& r) {
  const std::size_t n = s.size();
  std::vector<Chars> body(n), suffix(n);
  for (std::size_t i = 0; i < n; ++i) body[i] = Chars(1, s[i]);
  for (std::size_t d : r.deletes) body[d].clear();
  for (const auto& m : r.modifies) {
    for (std::size_t i = m.pos; i < m.pos + m.span; ++i) body[i].clear();
    body[m.pos] = m.label;
  }
  for (const auto& ins : r.inserts) suffix[ins.pos] += ins.label;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (r.switch_op) order = r.switch_op->order;
  Chars out;
  for (std::size_t p : order) out += body[p] + suffix[p];
  return Sentence(out);
}

inline std::size_t count_items(const Reference& r) {
  std::size_t n = r.deletes.size() + r.inserts.size() + r.modifies.size();
  if (r.switch_op) {
    for (std::size_t k = 0; k < r.switch_op->order.size(); ++k) {
      if (r.switch_op->order[k] != k) return n + 1;
    }
  }
  return n;
}

// --- exhaustive substring pair ---------------------------------------------

struct Occurrence {
  std::size_t i = 0, j = 0, len = 0;
};

inline bool better(const Occurrence& a, const Occurrence& b) {
  if (a.len != b.len) return a.len > b.len;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

inline std::vector<Occurrence> all_common_substrings(const Chars& s, const Chars& t) {
  std::vector<Occurrence> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j)
      for (std::size_t len = 1; i + len <= s.size() && j + len <= t.size(); ++len) {
        if (s.compare(i, len, t, j, len) != 0) break;
        out.push_back({i, j, len});
      }
  return out;
}

inline std::pair<std::optional<Occurrence>, std::optional<Occurrence>> substring_pair(const Chars& s, const Chars& t) {
  const auto all = all_common_substrings(s, t);
  std::optional<Occurrence> first, second;
  for (const auto& o : all)
    if (!first || better(o, *first)) first = o;
  if (!first) return {first, second};
  auto disjoint = [&](const Occurrence& o) {
    return (o.i + o.len <= first->i || first->i + first->len <= o.i) &&
           (o.j + o.len <= first->j || first->j + first->len <= o.j);
  };
  for (const auto& o : all)
    if (disjoint(o) && (!second || better(o, *second))) second = o;
  return {first, second};
}

// --- block swaps ---------------------------------------------------------------

// s = P A M B Q  ->  P B M A Q with A and B non-empty.
inline std::optional<std::vector<std::size_t>> block_swap_to(const Chars& s, const Chars& t) {
  const std::size_t n = s.size();
  if (t.size() != n || s == t) return std::nullopt;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b <= n; ++b)
      for (std::size_t c = b; c <= n; ++c)
        for (std::size_t d = c + 1; d <= n; ++d) {
          std::vector<std::size_t> order;
          for (std::size_t k = 0; k < a; ++k) order.push_back(k);
          for (std::size_t k = c; k < d; ++k) order.push_back(k);
          for (std::size_t k = b; k < c; ++k) order.push_back(k);
          for (std::size_t k = a; k < b; ++k) order.push_back(k);
          for (std::size_t k = d; k < n; ++k) order.push_back(k);
          bool ok = true;
          for (std::size_t k = 0; k < n && ok; ++k) ok = s[order[k]] == t[k];
          if (ok) return order;
        }
  return std::nullopt;
}

inline bool is_permutation_of(const Chars& s, const Chars& t) {
  return s.size() == t.size() && std::is_permutation(s.begin(), s.end(), t.begin());
}

// --- minimal edit cost by exhaustive matching enumeration ----------------------

struct EditOptimum {
  std::size_t cost = std::numeric_limits<std::size_t>::max();
  std::size_t ops = std::numeric_limits<std::size_t>::max();
  bool operator<(const EditOptimum& o) const { return cost != o.cost ? cost < o.cost : ops < o.ops; }
};

// Every monotone matching of equal characters defines gaps between kept
// characters. A gap of k source and m target characters costs max(k, m);
// it takes k delete items when m = 0 and one item otherwise. Text before the
// first source character has no anchor, so a leading gap with k = 0 < m is
// not realizable.
inline EditOptimum edit_optimum(const Chars& s, const Chars& t) {
  EditOptimum best;
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  auto score = [&]() {
    EditOptimum e{0, 0};
    std::size_t pi = 0, pj = 0;
    auto gap = [&](std::size_t k, std::size_t m, bool leading) {
      if (k == 0 && m == 0) return true;
      if (leading && k == 0) return false;
      e.cost += std::max(k, m);
      e.ops += m == 0 ? k : 1;
      return true;
    };
    bool first = true;
    for (auto [i, j] : kept) {
      if (!gap(i - pi, j - pj, first)) return;
      first = false;
      pi = i + 1;
      pj = j + 1;
    }
    if (!gap(s.size() - pi, t.size() - pj, first)) return;
    if (e < best) best = e;
  };
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    score();
    for (std::size_t a = i; a < s.size(); ++a)
      for (std::size_t b = j; b < t.size(); ++b)
        if (s[a] == t[b]) {
          kept.emplace_back(a, b);
          self(self, a + 1, b + 1);
          kept.pop_back();
        }
  };
  rec(rec, 0, 0);
  return best;
}

// --- permutations and softmax ----------------------------------------------------

inline double enumerate_best_path(const fcgec::stg::ScoreMatrix& a, std::vector<std::size_t>* best_order = nullptr) {
  const std::size_t n = a.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double score = std::log(a(a.bos(), p[0]) + 1e-12);
    for (std::size_t k = 1; k < n; ++k) score += std::log(a(p[k - 1], p[k]) + 1e-12);
    score += std::log(a(p[n - 1], a.eos()) + 1e-12);
    if (score > best) {
      best = score;
      if (best_order) *best_order = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

inline std::vector<std::vector<double>> softmax_rows(const std::vector<std::vector<double>>& q,
                                                     const std::vector<std::vector<double>>& k) {
  const double scale = std::sqrt(static_cast<double>(q[0].size()));
  std::vector<std::vector<double>> out;
  for (const auto& qi : q) {
    std::vector<double> row;
    double total = 0;
    for (const auto& kj : k) {
      double dot = 0;
      for (std::size_t d = 0; d < qi.size(); ++d) dot += qi[d] * kj[d];
      row.push_back(std::exp(dot / scale));
      total += row.back();
    }
    for (double& v : row) v /= total;
    out.push_back(row);
  }
  return out;
}

// --- random inputs ---------------------------------------------------------------

inline Chars random_chars(std::mt19937_64& rng, std::size_t len, std::size_t alphabet) {
  static const Chars kSymbols = fcgec::decode_utf8("ABCDEFGHIJKLMNOPQRST我们学习中文的了是在");
  std::uniform_int_distribution<std::size_t> pick(0, std::min(alphabet, kSymbols.size()) - 1);
  Chars out;
  for (std::size_t k = 0; k < len; ++k) out.push_back(kSymbols[pick(rng)]);
  return out;
}

// Valid references whose compound tags never need more than 6 fills.
inline Reference random_reference(std::mt19937_64& rng, const Sentence& s, std::size_t alphabet) {
  const std::size_t n = s.size();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto between = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  Reference r;
  if (u(rng) < 0.3 && n > 1) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    r.switch_op = fcgec::Switch{order};
  }
  std::vector<bool> interior(n, false);
  for (std::size_t i = 0; i < n;) {
    const double roll = u(rng);
    if (roll < 0.15) {
      r.deletes.push_back(i);
      ++i;
    } else if (roll < 0.3) {
      const std::size_t span = std::min(between(1, 2), n - i);
      const std::size_t m = between(1, span + 1);
      r.modifies.push_back({i, span, random_chars(rng, m, alphabet)});
      for (std::size_t k = i; k + 1 < i + span; ++k) interior[k] = true;
      i += span;
    } else {
      ++i;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (interior[i] || u(rng) > 0.15) continue;
    std::size_t budget = 3;
    while (budget > 0 && u(rng) < 0.6) {
      const std::size_t len = between(1, budget);
      r.inserts.push_back({i, len, random_chars(rng, len, alphabet)});
      budget -= len;
    }
  }
  std::stable_sort(r.inserts.begin(), r.inserts.end(),
                   [](const fcgec::InsertItem& a, const fcgec::InsertItem& b) { return a.pos < b.pos; });
  return r;
}

}  // namespace oracle
