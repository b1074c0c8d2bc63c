#include <doctest.h>

#include "fcgec/error.hpp"
#include "fcgec/model.hpp"
#include "oracles.hpp"

using namespace fcgec;
using oracle::C;
using oracle::S;

namespace {

Reference switch_of(std::vector<std::size_t> order) {
  Reference r;
  r.switch_op = Switch{std::move(order)};
  return r;
}

bool has_kind(const std::vector<Violation>& v, ViolationKind kind) {
  for (const auto& x : v)
    if (x.kind == kind) return true;
  return false;
}

}  // namespace

TEST_CASE("golden operation examples") {
  const auto s = S("ABCDE");
  CHECK(apply_reference(s, switch_of({0, 2, 1, 3, 4})) == S("ACBDE"));

  Reference del;
  del.deletes = {3};
  CHECK(apply_reference(s, del) == S("ABCE"));

  Reference ins;
  ins.inserts = {make_insert(1, C("F"))};
  CHECK(apply_reference(s, ins) == S("ABFCDE"));

  Reference mod;
  mod.modifies = {make_modify(2, 1, C("F"))};
  CHECK(apply_reference(s, mod) == S("ABFDE"));

  CHECK(apply_reference(s, Reference{}) == s);
}

TEST_CASE("switch then delete by original index") {
  auto r = switch_of({0, 2, 1, 3, 4});
  r.deletes = {1};
  CHECK(apply_reference(S("ABCDE"), r) == S("ACDE"));
  CHECK(oracle::naive_apply(S("ABCDE"), r) == S("ACDE"));
}

TEST_CASE("inserts at one anchor keep item order") {
  Reference r;
  r.inserts = {make_insert(1, C("F")), make_insert(1, C("G"))};
  CHECK(apply_reference(S("ABCDE"), r) == S("ABFGCDE"));
}

TEST_CASE("modify spans and inserts after them") {
  Reference r;
  r.modifies = {make_modify(1, 2, C("XYZ"))};
  r.inserts = {make_insert(2, C("Q"))};
  CHECK(apply_reference(S("ABCDE"), r) == S("AXYZQDE"));

  Reference bad = r;
  bad.inserts = {make_insert(1, C("Q"))};
  CHECK(has_kind(validate_reference(S("ABCDE"), bad), ViolationKind::Overlap));
}

TEST_CASE("insert after a deleted character") {
  Reference r;
  r.deletes = {2};
  r.inserts = {make_insert(2, C("Z"))};
  CHECK(validate_reference(S("ABCDE"), r).empty());
  CHECK(apply_reference(S("ABCDE"), r) == S("ABZDE"));
}

TEST_CASE("validation") {
  CHECK(validate_reference(S("ABCDE"), switch_of({0, 2, 1, 3, 4})).empty());
  CHECK(has_kind(validate_reference(S("ABCDE"), switch_of({0, 2, 2, 3, 4})), ViolationKind::NotPermutation));
  CHECK(has_kind(validate_reference(S("ABCDE"), switch_of({0, 1, 2, 3})), ViolationKind::NotPermutation));

  Reference oob;
  oob.deletes = {5};
  auto v = validate_reference(S("ABC"), oob);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::IndexOutOfRange);
  CHECK(v[0].field_path == "Delete[0]");

  Reference unsorted;
  unsorted.deletes = {3, 1};
  CHECK(has_kind(validate_reference(S("ABCDE"), unsorted), ViolationKind::NotIncreasing));

  Reference overlap;
  overlap.deletes = {2};
  overlap.modifies = {make_modify(1, 2, C("X"))};
  CHECK(has_kind(validate_reference(S("ABCDE"), overlap), ViolationKind::Overlap));

  Reference arity;
  arity.inserts = {InsertItem{0, 2, C("F")}};
  CHECK(has_kind(validate_reference(S("ABCDE"), arity), ViolationKind::CountMismatch));

  Reference empty_label;
  empty_label.modifies = {ModifyItem{0, 1, {}}};
  CHECK(has_kind(validate_reference(S("ABCDE"), empty_label), ViolationKind::EmptyLabel));

  Reference long_span;
  long_span.modifies = {make_modify(3, 3, C("X"))};
  CHECK(has_kind(validate_reference(S("ABCDE"), long_span), ViolationKind::IndexOutOfRange));

  CHECK_THROWS_AS(apply_reference(S("ABC"), oob), Error);
  try {
    apply_reference(S("ABC"), oob);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidReference);
  }
}

TEST_CASE("strict mode flags switches mixed with positional edits") {
  auto r = switch_of({1, 0, 2});
  r.deletes = {2};
  CHECK(validate_reference(S("ABC"), r).empty());
  CHECK(has_kind(validate_reference(S("ABC"), r, {true}), ViolationKind::AmbiguousWithSwitch));
  CHECK(validate_reference(S("ABC"), switch_of({1, 0, 2}), {true}).empty());
}

TEST_CASE("op and character counts") {
  CHECK(op_count(Reference{}) == 0);
  CHECK(op_count(switch_of({0, 2, 1, 3, 4})) == 1);
  CHECK(op_count(switch_of({0, 1, 2, 3, 4})) == 0);
  Reference d;
  d.deletes = {3, 4};
  CHECK(op_count(d) == 2);
  CHECK(char_cost(d) == 2);
  Reference m;
  m.modifies = {make_modify(0, 2, C("XYZ"))};
  m.inserts = {make_insert(3, C("QQ"))};
  CHECK(op_count(m) == 2);
  CHECK(char_cost(m) == 5);
}

TEST_CASE("apply agrees with the naive interpreter on random references") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 3000; ++iter) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const Sentence s(oracle::random_chars(rng, n, 6));
    const Reference r = oracle::random_reference(rng, s, 6);
    REQUIRE(validate_reference(s, r).empty());
    REQUIRE(apply_reference(s, r) == oracle::naive_apply(s, r));
    REQUIRE(op_count(r) == oracle::count_items(r));
  }
}

TEST_CASE("error type names") {
  for (ErrorType t : kAllErrorTypes) CHECK(parse_error_type(to_string(t)) == t);
  CHECK_FALSE(parse_error_type("XYZ").has_value());
}

TEST_CASE("utf8 codec") {
  const auto s = S("我们学习中文");
  CHECK(s.size() == 6);
  CHECK(s.utf8() == "我们学习中文");
  CHECK_THROWS_AS(decode_utf8("\xE6\x88"), Error);
  CHECK_THROWS_AS(decode_utf8("\xC0\xAF"), Error);
  CHECK_THROWS_AS(decode_utf8("\xED\xA0\x80"), Error);
}
