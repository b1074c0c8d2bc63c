#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fcgec/model.hpp"
#include "fcgec/stg.hpp"

namespace fcgec::corpus {

using Json = nlohmann::ordered_json;

// --- operation records -----------------------------------------------------

/// Parses one reference object, e.g. {"Switch":[0,2,1,3,4]} or
/// {"Insert":[{"pos":1,"tag":"INS_1","label":["F"]}]}. Labels may be a
/// string or an array of strings. Throws Error(SchemaError) with a field path
/// relative to `where`.
Reference reference_from_json(const Json& j, const std::string& where = "operation");
Json reference_to_json(const Reference& r);

/// Compact single-line form, `{}` for the empty reference.
std::string reference_to_string(const Reference& r);
Reference parse_reference(std::string_view text);

// --- corpus files ------------------------------------------------------------

enum class ParseMode { Strict, Lenient };

struct RecordFailure {
  std::string id;
  std::string field_path;
  std::string message;
};

struct ParseResult {
  std::vector<CorrectionInstance> instances;
  std::vector<RecordFailure> failures;  // lenient mode only
};

/// Top-level object mapping id -> record. Strict mode throws
/// Error(SchemaError) on the first bad record; lenient mode skips bad
/// records and reports them.
ParseResult parse_corpus(std::string_view text, ParseMode mode = ParseMode::Strict);
ParseResult parse_corpus_file(const std::filesystem::path& file, ParseMode mode = ParseMode::Strict);

Json instance_to_json(const CorrectionInstance& instance);
CorrectionInstance instance_from_json(const std::string& id, const Json& record);
std::string serialize_corpus(const std::vector<CorrectionInstance>& instances, int indent = 1);

// --- validation --------------------------------------------------------------

enum class Severity { Error, Note };

struct Issue {
  Severity severity;
  std::string id;
  std::string field_path;
  std::string message;
};

struct CorpusReport {
  std::size_t checked = 0;
  std::size_t with_errors = 0;
  std::vector<Issue> issues;

  bool clean() const { return with_errors == 0; }
};

CorpusReport validate_corpus(const std::vector<CorrectionInstance>& instances,
                             ValidationOptions options = {});

// --- statistics --------------------------------------------------------------

enum class OpCountUnit {
  PerItem,       // switch once, each delete position, each insert/modify item
  PerReference,  // each operation kind once per reference that uses it
};

struct StatsOptions {
  bool dedupe = false;  // collapse identical references within an instance
  OpCountUnit unit = OpCountUnit::PerItem;
};

struct OpCounts {
  std::size_t switch_ops = 0;
  std::size_t delete_ops = 0;
  std::size_t insert_ops = 0;
  std::size_t modify_ops = 0;
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t erroneous = 0;
  OpCounts ops;
  std::map<ErrorType, double> type_pct;
  std::size_t len_min = 0;
  std::size_t len_max = 0;
  double len_mean = 0.0;
  std::vector<std::size_t> ref_hist;  // ref_hist[k] = erroneous sentences with k references
  double mean_refs = 0.0;             // over erroneous sentences
};

/// Throws Error(EmptyInput) on no instances.
CorpusStats compute_stats(const std::vector<CorrectionInstance>& instances, StatsOptions options = {});

std::string stats_text(const CorpusStats& stats);
Json stats_record(const CorpusStats& stats);

struct TagCoverage {
  std::size_t items = 0;      // insert and modify items
  std::size_t encodable = 0;  // items needing t <= max_insert
  double fraction() const { return items ? static_cast<double>(encodable) / static_cast<double>(items) : 1.0; }
};

TagCoverage tag_coverage(const std::vector<CorrectionInstance>& instances,
                         std::size_t max_insert = stg::kDefaultMaxInsert);

// --- STG label records -------------------------------------------------------

/// {"id", "ref", "first", "next", "tags", "fills"}; `next` uses n as END.
Json stg_record(const std::string& id, std::size_t ref_index, const stg::StgLabels& labels);
stg::StgLabels stg_from_json(const Json& j);

}  // namespace fcgec::corpus
