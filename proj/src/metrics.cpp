#include "fcgec/metrics.hpp"

#include <algorithm>
#include <tuple>

#include "fcgec/error.hpp"
#include "fcgec/min_edit.hpp"

namespace fcgec::metrics {

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Insert: return "insert";
    case EditKind::Delete: return "delete";
    case EditKind::Substitute: return "substitute";
  }
  return "?";
}

std::vector<EditSpan> extract_edits(const Sentence& src, const Sentence& tgt) {
  std::vector<EditSpan> spans;
  if (src == tgt) return spans;
  const Reference path = derive_edit_path(src, tgt);

  for (std::size_t k = 0; k < path.deletes.size();) {
    std::size_t end = k + 1;
    while (end < path.deletes.size() && path.deletes[end] == path.deletes[end - 1] + 1) ++end;
    spans.push_back({EditKind::Delete, path.deletes[k], path.deletes[end - 1] + 1, {}});
    k = end;
  }
  for (const auto& ins : path.inserts) spans.push_back({EditKind::Insert, ins.pos + 1, ins.pos + 1, ins.label});
  for (const auto& m : path.modifies) spans.push_back({EditKind::Substitute, m.pos, m.pos + m.span, m.label});
  std::sort(spans.begin(), spans.end(), [](const EditSpan& a, const EditSpan& b) {
    return std::tie(a.begin, a.end) < std::tie(b.begin, b.end);
  });
  return spans;
}

MatchCounts match_edits(const std::vector<EditSpan>& hyp, const std::vector<EditSpan>& ref) {
  MatchCounts c{0, hyp.size(), ref.size()};
  std::vector<bool> used(ref.size(), false);
  for (const auto& h : hyp) {
    for (std::size_t k = 0; k < ref.size(); ++k) {
      if (!used[k] && ref[k] == h) {
        used[k] = true;
        ++c.tp;
        break;
      }
    }
  }
  return c;
}

double precision(const MatchCounts& c) {
  return c.hyp_count ? static_cast<double>(c.tp) / static_cast<double>(c.hyp_count) : 1.0;
}

double recall(const MatchCounts& c) {
  return c.ref_count ? static_cast<double>(c.tp) / static_cast<double>(c.ref_count) : 1.0;
}

double f_half(double p, double r) {
  const double denom = 0.25 * p + r;
  return (p + r) > 0.0 && denom > 0.0 ? 1.25 * p * r / denom : 0.0;
}

EvalScores evaluate_instance(const Sentence& src, const Sentence& hyp, const std::vector<Reference>& refs) {
  if (refs.empty()) throw Error(Errc::PreconditionViolated, "at least one reference is required");
  const auto hyp_edits = extract_edits(src, hyp);
  EvalScores best;
  bool have = false;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const Sentence realized = apply_reference(src, refs[k]);
    if (realized == hyp) best.exact_match = true;
    const MatchCounts c = match_edits(hyp_edits, extract_edits(src, realized));
    const double p = precision(c);
    const double r = recall(c);
    const double f = f_half(p, r);
    if (!have || f > best.f_half || (f == best.f_half && p > best.precision)) {
      have = true;
      best.precision = p;
      best.recall = r;
      best.f_half = f;
      best.counts = c;
      best.best_reference = k;
    }
  }
  return best;
}

void AggregateScores::add(const EvalScores& s) {
  ++rows;
  if (s.exact_match) ++exact;
  counts.tp += s.counts.tp;
  counts.hyp_count += s.counts.hyp_count;
  counts.ref_count += s.counts.ref_count;
}

CorpusReport evaluate_corpus(const std::vector<EvalRow>& rows) {
  if (rows.empty()) throw Error(Errc::EmptyInput, "no rows to evaluate");
  CorpusReport report;
  report.per_row.reserve(rows.size());
  for (const auto& row : rows) {
    auto scores = evaluate_instance(row.source, row.hypothesis, row.references);
    report.overall.add(scores);
    for (ErrorType t : row.error_types) report.by_type[t].add(scores);
    report.per_row.push_back(std::move(scores));
  }
  return report;
}

}  // namespace fcgec::metrics
