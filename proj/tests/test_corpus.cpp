#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fcgec/corpus.hpp"
#include "fcgec/error.hpp"
#include "oracles.hpp"

using namespace fcgec;
using namespace fcgec::corpus;
using oracle::C;
using oracle::S;

namespace {

const std::filesystem::path kFixture = std::filesystem::path(FCGEC_TEST_DATA) / "fixture.json";

Errc code_of(std::string_view text) {
  try {
    parse_corpus(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::NotFound;
}

std::string field_of(std::string_view text) {
  try {
    parse_corpus(text);
  } catch (const Error& e) {
    return e.field_path();
  }
  return {};
}

CorrectionInstance instance(std::string id, const char* sentence, bool flag, std::vector<ErrorType> types,
                            std::vector<Reference> refs) {
  CorrectionInstance inst;
  inst.id = std::move(id);
  inst.sentence = S(sentence);
  inst.error_flag = flag;
  inst.error_types = std::move(types);
  inst.references = std::move(refs);
  return inst;
}

}  // namespace

TEST_CASE("reference records") {
  auto sw = parse_reference(R"({"Switch":[0,2,1,3,4]})");
  CHECK(apply_reference(S("ABCDE"), sw) == S("ACBDE"));
  CHECK(reference_to_string(sw) == R"({"Switch":[0,2,1,3,4]})");

  auto ins = parse_reference(R"({"Insert":[{"pos":1,"tag":"INS_1","label":["F"]}]})");
  CHECK(apply_reference(S("ABCDE"), ins) == S("ABFCDE"));
  CHECK(reference_to_string(ins) == R"({"Insert":[{"pos":1,"tag":"INS_1","label":["F"]}]})");

  auto mod = parse_reference(R"({"Modify":[{"pos":2,"tag":"MOD_1","label":"F"}]})");
  CHECK(apply_reference(S("ABCDE"), mod) == S("ABFDE"));

  auto wide = parse_reference(R"({"Modify":[{"pos":1,"tag":"MOD_2","label":["X","Y","Z"]}]})");
  CHECK(wide.modifies[0].span == 2);
  CHECK(apply_reference(S("ABCDE"), wide) == S("AXYZDE"));

  CHECK(reference_to_string(Reference{}) == "{}");
  CHECK(parse_reference("{}").empty());
  CHECK(reference_to_string(parse_reference(R"({"Delete":[3]})")) == R"({"Delete":[3]})");
}

TEST_CASE("schema errors") {
  CHECK(code_of(R"({"x":{"sentence":"ABC","error_flag":1,"operation":[{"Insert":[{"pos":0,"tag":"INS_1","label":["F","G"]}]}]}})") ==
        Errc::SchemaError);
  CHECK(field_of(R"({"x":{"sentence":"ABC","error_flag":1,"operation":[{"Insert":[{"pos":0,"tag":"INS_1","label":["F","G"]}]}]}})") ==
        "x.operation[0].Insert[0]");
  CHECK(code_of(R"({"x":{"sentence":"ABC","error_flag":1,"extra":2}})") == Errc::SchemaError);
  CHECK(field_of(R"({"x":{"sentence":"ABC","error_flag":1,"extra":2}})") == "x.extra");
  CHECK(code_of(R"({"x":{"sentence":"ABC","error_flag":"yes"}})") == Errc::SchemaError);
  CHECK(code_of(R"({"x":{"sentence":"","error_flag":0}})") == Errc::SchemaError);
  CHECK(code_of(R"({"x":{"sentence":"ABC","error_flag":1,"error_type":"XX"}})") == Errc::SchemaError);
  CHECK(code_of(R"({"x":{"sentence":"ABC","error_flag":1,"operation":[{"Rotate":[1]}]}})") == Errc::SchemaError);
  CHECK(code_of(R"({"x":{"sentence":"ABC","error_flag":1,"operation":"[{"}})") == Errc::SchemaError);
  CHECK(code_of("[1,2]") == Errc::SchemaError);
  CHECK(code_of("not json") == Errc::SchemaError);
}

TEST_CASE("lenient parsing keeps good records") {
  auto result = parse_corpus(R"({"a":{"sentence":"ABC","error_flag":0},"b":{"sentence":"ABC","error_flag":7}})",
                             ParseMode::Lenient);
  CHECK(result.instances.size() == 1);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].id == "b");
  CHECK(result.failures[0].field_path == "b.error_flag");
}

TEST_CASE("fixture parses") {
  const auto parsed = parse_corpus_file(kFixture);
  REQUIRE(parsed.instances.size() == 5);
  const auto& sw = parsed.instances[0];
  CHECK(sw.id == "a1f3");
  CHECK(sw.error_flag);
  CHECK(sw.error_types == std::vector<ErrorType>{ErrorType::IWO});
  CHECK(apply_reference(sw.sentence, sw.references[0]) == S("ACBDE"));
  CHECK(sw.external == R"({"source":"exam","version":1})");

  const auto& ok = parsed.instances[1];
  CHECK_FALSE(ok.error_flag);
  CHECK(ok.error_types.empty());
  CHECK_FALSE(ok.has_nonempty_reference());

  CHECK(parsed.instances[2].error_types == std::vector<ErrorType>{ErrorType::CR, ErrorType::SC});
  CHECK(apply_reference(parsed.instances[2].sentence, parsed.instances[2].references[0]) ==
        S("这次活动，使我们开阔了眼界。"));
  CHECK(apply_reference(parsed.instances[3].sentence, parsed.instances[3].references[1]) == S("他的成绩提高了不少。"));
  CHECK(apply_reference(parsed.instances[4].sentence, parsed.instances[4].references[0]) ==
        S("我们要培养学生独立思考的能力。"));

  CHECK_THROWS_AS(parse_corpus_file("/nonexistent/corpus.json"), Error);
}

TEST_CASE("serialize then parse is a fixed point") {
  const auto first = parse_corpus_file(kFixture).instances;
  const auto text = serialize_corpus(first);
  const auto second = parse_corpus(text).instances;
  CHECK(first == second);
  CHECK(serialize_corpus(second) == text);

  std::mt19937_64 rng(59);
  std::vector<CorrectionInstance> random;
  for (int k = 0; k < 200; ++k) {
    const Sentence s(oracle::random_chars(rng, 1 + rng() % 12, 12));
    std::vector<Reference> refs;
    for (std::size_t j = 0; j < 1 + rng() % 3; ++j) refs.push_back(oracle::random_reference(rng, s, 12));
    random.push_back({"r" + std::to_string(k), s, true, {ErrorType::CM}, refs, ""});
  }
  CHECK(parse_corpus(serialize_corpus(random)).instances == random);
}

TEST_CASE("corpus validation") {
  CHECK(validate_corpus(parse_corpus_file(kFixture).instances).clean());

  Reference empty;
  auto flagged = validate_corpus({instance("e", "ABC", true, {ErrorType::CM}, {empty})});
  CHECK(flagged.with_errors == 1);
  CHECK(flagged.issues[0].field_path == "error_flag");

  Reference oob;
  oob.deletes = {5};
  auto bounds = validate_corpus({instance("z9", "ABC", true, {ErrorType::CR}, {oob})});
  REQUIRE(bounds.with_errors == 1);
  CHECK(bounds.issues[0].id == "z9");
  CHECK(bounds.issues[0].field_path == "operation[0].Delete[0]");

  Reference d;
  d.deletes = {1};
  auto dup = validate_corpus({instance("d", "ABC", true, {ErrorType::CR}, {d, d})});
  CHECK(dup.clean());
  REQUIRE(dup.issues.size() == 1);
  CHECK(dup.issues[0].severity == Severity::Note);
}

TEST_CASE("hand-counted statistics") {
  Reference sw;
  sw.switch_op = Switch{{1, 0, 2}};
  Reference di;
  di.deletes = {0};
  di.inserts = {make_insert(1, C("X"))};
  std::vector<CorrectionInstance> three{instance("1", "ABC", false, {}, {Reference{}}),
                                        instance("2", "ABCD", true, {ErrorType::IWO}, {sw}),
                                        instance("3", "ABCDEF", true, {ErrorType::CR, ErrorType::CM}, {di})};
  const auto st = compute_stats(three);
  CHECK(st.sentences == 3);
  CHECK(st.erroneous == 2);
  CHECK(st.ops == OpCounts{1, 1, 1, 0});
  CHECK(st.len_min == 3);
  CHECK(st.len_max == 6);
  CHECK(st.len_mean == doctest::Approx(13.0 / 3));
  CHECK(st.mean_refs == doctest::Approx(1.0));
  CHECK(st.ref_hist == std::vector<std::size_t>{0, 2});
  CHECK(st.type_pct.at(ErrorType::IWO) == doctest::Approx(100.0 / 3));
  CHECK(st.type_pct.at(ErrorType::AM) == 0.0);

  const auto rec = stats_record(st);
  CHECK(rec["sentences"] == 3);
  CHECK(rec["switch"] == 1);
  CHECK(rec["len"]["max"] == 6);
  CHECK(stats_text(st).find("erroneous") != std::string::npos);

  CHECK_THROWS_AS(compute_stats({}), Error);
}

TEST_CASE("counting conventions") {
  Reference a;
  a.deletes = {0, 2};
  Reference b;
  b.deletes = {1};
  b.modifies = {make_modify(3, 1, C("X")), make_modify(4, 1, C("Y"))};
  std::vector<CorrectionInstance> one{instance("1", "ABCDEF", true, {ErrorType::CR}, {a, a, b})};

  CHECK(compute_stats(one).ops == OpCounts{0, 5, 0, 2});
  CHECK(compute_stats(one, {true, OpCountUnit::PerItem}).ops == OpCounts{0, 3, 0, 2});
  CHECK(compute_stats(one, {false, OpCountUnit::PerReference}).ops == OpCounts{0, 3, 0, 1});
  CHECK(compute_stats(one, {true, OpCountUnit::PerReference}).ops == OpCounts{0, 2, 0, 1});
  CHECK(compute_stats(one).ref_hist == std::vector<std::size_t>{0, 0, 0, 1});
  CHECK(compute_stats(one, {true, OpCountUnit::PerItem}).mean_refs == doctest::Approx(2.0));
}

TEST_CASE("tag coverage") {
  Reference r;
  r.inserts = {make_insert(0, C("123456")), make_insert(1, C("1234567"))};
  r.modifies = {make_modify(2, 1, C("1234567")), make_modify(3, 2, C("123456789"))};
  const auto cov = tag_coverage({instance("1", "ABCDEF", true, {ErrorType::CM}, {r})});
  CHECK(cov.items == 4);
  CHECK(cov.encodable == 2);
  CHECK(cov.fraction() == doctest::Approx(0.5));
  CHECK(tag_coverage({}).fraction() == 1.0);
}

TEST_CASE("label records round trip") {
  Reference r = parse_reference(R"({"Switch":[0,2,1,3,4],"Delete":[1]})");
  const auto labels = stg::encode_instance(S("ABCDE"), r);
  const auto rec = stg_record("a1", 0, labels);
  CHECK(rec.dump() == R"({"id":"a1","ref":0,"first":0,"next":[2,3,1,4,5],"tags":["K","K","D","K","K"],"fills":""})");
  CHECK(stg_from_json(Json::parse(rec.dump())) == labels);
  CHECK_THROWS_AS(stg_from_json(Json::parse(R"({"first":0})")), Error);
}
