#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fcgec/model.hpp"
#include "fcgec/text.hpp"

namespace fcgec::metrics {

enum class EditKind : unsigned char { Insert, Delete, Substitute };

std::string_view to_string(EditKind kind);

// Source range [begin, end) in original indices; begin == end for inserts.
struct EditSpan {
  EditKind kind;
  std::size_t begin = 0;
  std::size_t end = 0;
  Chars replacement;
  friend bool operator==(const EditSpan&, const EditSpan&) = default;
  friend auto operator<=>(const EditSpan&, const EditSpan&) = default;
};

/// Character-level minimum-edit spans, using the same alignment as
/// derive_edit_path; adjacent non-copy edits merge into one span.
std::vector<EditSpan> extract_edits(const Sentence& src, const Sentence& tgt);

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t hyp_count = 0;
  std::size_t ref_count = 0;
};

MatchCounts match_edits(const std::vector<EditSpan>& hyp, const std::vector<EditSpan>& ref);

// An empty denominator scores 1 (nothing proposed is nothing wrong).
double precision(const MatchCounts& c);
double recall(const MatchCounts& c);
double f_half(double p, double r);

struct EvalScores {
  double precision = 0.0;
  double recall = 0.0;
  double f_half = 0.0;
  bool exact_match = false;
  MatchCounts counts;
  std::size_t best_reference = 0;
};

/// Exact match against any realized reference; P/R/F0.5 from the reference
/// maximising F0.5 (ties: higher precision, then earlier reference).
EvalScores evaluate_instance(const Sentence& src, const Sentence& hyp, const std::vector<Reference>& refs);

struct EvalRow {
  Sentence source;
  Sentence hypothesis;
  std::vector<Reference> references;
  std::vector<ErrorType> error_types;
};

struct AggregateScores {
  std::size_t rows = 0;
  std::size_t exact = 0;
  MatchCounts counts;

  double exact_match() const { return rows ? static_cast<double>(exact) / static_cast<double>(rows) : 0.0; }
  double precision() const { return metrics::precision(counts); }
  double recall() const { return metrics::recall(counts); }
  double f_half() const { return metrics::f_half(precision(), recall()); }
  void add(const EvalScores& s);
};

struct CorpusReport {
  AggregateScores overall;
  std::map<ErrorType, AggregateScores> by_type;
  std::vector<EvalScores> per_row;
};

/// Micro-averaged over summed counts of each row's best reference.
/// Throws Error(EmptyInput) on no rows.
CorpusReport evaluate_corpus(const std::vector<EvalRow>& rows);

}  // namespace fcgec::metrics
