#include <doctest.h>

#include "fcgec/error.hpp"
#include "fcgec/min_edit.hpp"
#include "oracles.hpp"

using namespace fcgec;
using oracle::C;
using oracle::S;

TEST_CASE("substring pair examples") {
  auto p = longest_common_substring_pair(C("ABCDE"), C("ACBDE"));
  CHECK(p.first == SubstringMatch{3, 3, 2});
  REQUIRE(p.second.has_value());
  CHECK(*p.second == SubstringMatch{0, 0, 1});

  auto same = longest_common_substring_pair(C("ABAB"), C("ABAB"));
  CHECK(same.first == SubstringMatch{0, 0, 4});
  CHECK_FALSE(same.second.has_value());

  try {
    longest_common_substring_pair(C("XY"), C("AB"));
    FAIL("expected NoCommonSubstring");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoCommonSubstring);
  }
}

TEST_CASE("substring pair matches exhaustive enumeration") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto s = oracle::random_chars(rng, std::uniform_int_distribution<std::size_t>(1, 10)(rng), 3);
    const auto t = oracle::random_chars(rng, std::uniform_int_distribution<std::size_t>(1, 10)(rng), 3);
    const auto [first, second] = oracle::substring_pair(s, t);
    if (!first) {
      CHECK_THROWS_AS(longest_common_substring_pair(s, t), Error);
      continue;
    }
    const auto got = longest_common_substring_pair(s, t);
    REQUIRE(got.first == SubstringMatch{first->i, first->j, first->len});
    REQUIRE(got.second.has_value() == second.has_value());
    if (second) REQUIRE(*got.second == SubstringMatch{second->i, second->j, second->len});
  }
}

TEST_CASE("switch derivation examples") {
  auto r = try_switch_derivation(S("ABCDE"), S("ACBDE"));
  REQUIRE(r.has_value());
  CHECK(r->switch_op->order == std::vector<std::size_t>{0, 2, 1, 3, 4});

  CHECK_FALSE(try_switch_derivation(S("ABCDE"), S("ABCDE")).has_value());

  auto swapped = try_switch_derivation(S("AABB"), S("BBAA"));
  REQUIRE(swapped.has_value());
  CHECK(swapped->switch_op->order == std::vector<std::size_t>{2, 3, 0, 1});

  try {
    try_switch_derivation(S("ABC"), S("ABD"));
    FAIL("expected PreconditionViolated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PreconditionViolated);
  }
}

TEST_CASE("switch derivation finds every two-block swap") {
  std::mt19937_64 rng(13);
  for (int iter = 0; iter < 3000; ++iter) {
    const auto n = std::uniform_int_distribution<std::size_t>(2, 9)(rng);
    const auto s = oracle::random_chars(rng, n, 3);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    const std::size_t a = pick(0, n - 2);
    const std::size_t b = pick(a + 1, n - 1);
    const std::size_t c = pick(b, n - 1);
    const std::size_t d = pick(c + 1, n);
    Chars t = s.substr(0, a) + s.substr(c, d - c) + s.substr(b, c - b) + s.substr(a, b - a) + s.substr(d);
    if (t == s) continue;
    auto r = try_switch_derivation(Sentence(s), Sentence(t));
    REQUIRE(r.has_value());
    REQUIRE(apply_reference(Sentence(s), *r) == Sentence(t));
    REQUIRE(op_count(*r) == 1);
  }
}

TEST_CASE("switch derivation rejects non block swaps") {
  std::mt19937_64 rng(17);
  int rejected = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    const auto n = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
    const auto s = oracle::random_chars(rng, n, 4);
    Chars t = s;
    std::shuffle(t.begin(), t.end(), rng);
    auto r = try_switch_derivation(Sentence(s), Sentence(t));
    const bool swap = oracle::block_swap_to(s, t).has_value();
    REQUIRE(r.has_value() == swap);
    if (r) REQUIRE(apply_reference(Sentence(s), *r) == Sentence(t));
    rejected += swap ? 0 : 1;
  }
  CHECK(rejected > 0);
}

TEST_CASE("derive examples") {
  CHECK(derive_operations(S("ABCDE"), S("ABCDE")).empty());

  Reference ins;
  ins.inserts = {make_insert(1, C("F"))};
  CHECK(derive_operations(S("ABCDE"), S("ABFCDE")) == ins);

  Reference del;
  del.deletes = {3};
  CHECK(derive_operations(S("ABCDE"), S("ABCE")) == del);

  Reference mod;
  mod.modifies = {make_modify(1, 2, C("YYY"))};
  CHECK(derive_operations(S("AXXE"), S("AYYYE")) == mod);

  Reference sw;
  sw.switch_op = Switch{{0, 2, 1, 3, 4}};
  CHECK(derive_operations(S("ABCDE"), S("ACBDE")) == sw);

  Reference m2;
  m2.modifies = {make_modify(2, 1, C("F"))};
  CHECK(derive_operations(S("ABCDE"), S("ABFDE")) == m2);
}

TEST_CASE("leading insertion folds into the first character") {
  const auto r = derive_operations(S("ABC"), S("XABC"));
  CHECK(apply_reference(S("ABC"), r) == S("XABC"));
  CHECK(op_count(r) == 1);
  CHECK(r.modifies.size() == 1);
}

TEST_CASE("derive to and from short strings") {
  CHECK(apply_reference(S("ABC"), derive_operations(S("ABC"), S(""))) == S(""));
  CHECK(apply_reference(S("A"), derive_operations(S("A"), S("XYZ"))) == S("XYZ"));
}

TEST_CASE("normalize examples") {
  Reference noop;
  noop.modifies = {make_modify(2, 1, C("C"))};
  CHECK(normalize_reference(S("ABCDE"), noop).empty());

  Reference split;
  split.inserts = {make_insert(1, C("F")), make_insert(1, C("G"))};
  Reference merged;
  merged.inserts = {make_insert(1, C("FG"))};
  CHECK(normalize_reference(S("ABCDE"), split) == merged);

  Reference sw;
  sw.switch_op = Switch{{0, 2, 1, 3, 4}};
  CHECK(normalize_reference(S("ABCDE"), sw) == sw);

  Reference bad;
  bad.deletes = {9};
  CHECK_THROWS_AS(normalize_reference(S("ABCDE"), bad), Error);
}

TEST_CASE("derive round trip on random references") {
  std::mt19937_64 rng(19);
  for (int iter = 0; iter < 3000; ++iter) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 15)(rng);
    const Sentence s(oracle::random_chars(rng, n, 8));
    const Reference r = oracle::random_reference(rng, s, 8);
    const Sentence t = apply_reference(s, r);
    const Reference d = derive_operations(s, t);
    REQUIRE(validate_reference(s, d).empty());
    REQUIRE(apply_reference(s, d) == t);
    REQUIRE(normalize_reference(s, d) == d);
  }
}

TEST_CASE("edit path cost tracks levenshtein distance") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 3000; ++iter) {
    const auto s = oracle::random_chars(rng, std::uniform_int_distribution<std::size_t>(1, 10)(rng), 4);
    const auto t = oracle::random_chars(rng, std::uniform_int_distribution<std::size_t>(0, 10)(rng), 4);
    const auto path = derive_edit_path(Sentence(s), Sentence(t));
    REQUIRE(path.switch_op == std::nullopt);
    REQUIRE(apply_reference(Sentence(s), path) == Sentence(t));
    const auto lev = levenshtein_distance(s, t);
    REQUIRE(char_cost(path) >= lev);
    REQUIRE(char_cost(path) <= lev + 1);
    if (!t.empty() && s[0] == t[0]) REQUIRE(char_cost(path) == lev);
  }
}

TEST_CASE("derive is op-minimal against exhaustive search") {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int iter = 0; iter < 1500; ++iter) {
    const auto s = oracle::random_chars(rng, std::uniform_int_distribution<std::size_t>(1, 7)(rng), 4);
    const auto t = oracle::random_chars(rng, std::uniform_int_distribution<std::size_t>(1, 7)(rng), 4);
    if (oracle::is_permutation_of(s, t) && s != t && !oracle::block_swap_to(s, t)) continue;
    const auto d = derive_operations(Sentence(s), Sentence(t));
    std::size_t expected = 0;
    if (s == t)
      expected = 0;
    else if (oracle::block_swap_to(s, t))
      expected = 1;
    else
      expected = oracle::edit_optimum(s, t).ops;
    REQUIRE(op_count(d) == expected);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("levenshtein") {
  CHECK(levenshtein_distance(C("kitten"), C("sitting")) == 3);
  CHECK(levenshtein_distance(C(""), C("abc")) == 3);
  CHECK(levenshtein_distance(C("abc"), C("abc")) == 0);
}
