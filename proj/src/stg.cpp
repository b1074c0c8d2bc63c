#include "fcgec/stg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "fcgec/error.hpp"

namespace fcgec::stg {

PointerLabels switch_to_pointers(std::size_t n, const std::optional<Switch>& sw) {
  std::vector<std::size_t> order(n);
  if (sw) {
    order = sw->order;
    std::vector<bool> seen(n, false);
    if (order.size() != n) throw Error(Errc::InvalidPermutation, "switch length differs from sentence length");
    for (std::size_t i : order) {
      if (i >= n || seen[i]) throw Error(Errc::InvalidPermutation, "switch order is not a permutation");
      seen[i] = true;
    }
  } else {
    std::iota(order.begin(), order.end(), 0);
  }
  PointerLabels p;
  p.next.assign(n, n);
  if (n == 0) return p;
  p.first = order[0];
  for (std::size_t k = 0; k + 1 < n; ++k) p.next[order[k]] = order[k + 1];
  p.next[order[n - 1]] = n;
  return p;
}

std::vector<std::size_t> pointers_to_permutation(const PointerLabels& p) {
  const std::size_t n = p.next.size();
  std::vector<std::size_t> order;
  if (n == 0) return order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  std::size_t cur = p.first;
  while (cur != n) {
    if (cur > n || seen[cur]) {
      throw Error(Errc::CycleOrOrphan, "pointer chain revisits index " + std::to_string(cur));
    }
    seen[cur] = true;
    order.push_back(cur);
    cur = p.next[cur];
  }
  if (order.size() != n) {
    throw Error(Errc::CycleOrOrphan, "pointer chain ends after " + std::to_string(order.size()) + " of " +
                                         std::to_string(n) + " characters");
  }
  return order;
}

std::size_t Tag::mask_slots() const {
  switch (kind) {
    case TagKind::Keep:
    case TagKind::Delete: return 0;
    case TagKind::Insert: return count;
    case TagKind::Modify: return 1;
    case TagKind::ModifyInsert: return 1 + count;
  }
  return 0;
}

std::string Tag::str() const {
  switch (kind) {
    case TagKind::Keep: return "K";
    case TagKind::Delete: return "D";
    case TagKind::Insert: return "I_" + std::to_string(count);
    case TagKind::Modify: return "M";
    case TagKind::ModifyInsert: return "MI_" + std::to_string(count);
  }
  return "?";
}

Tag Tag::parse(std::string_view text) {
  if (text == "K") return {TagKind::Keep, 0};
  if (text == "D") return {TagKind::Delete, 0};
  if (text == "M") return {TagKind::Modify, 0};
  auto counted = [&](std::string_view prefix, TagKind kind) -> std::optional<Tag> {
    if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
    std::size_t value = 0;
    auto digits = text.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value == 0) return std::nullopt;
    return Tag{kind, value};
  };
  if (auto t = counted("MI_", TagKind::ModifyInsert)) return *t;
  if (auto t = counted("I_", TagKind::Insert)) return *t;
  throw Error(Errc::SchemaError, "unknown tag '" + std::string(text) + "'");
}

std::size_t mask_count(const std::vector<Tag>& tags) {
  std::size_t total = 0;
  for (const Tag& t : tags) total += t.mask_slots();
  return total;
}

TagSequence encode_tags(const Sentence& switched, const Reference& edits, std::size_t max_insert) {
  if (edits.switch_op) throw Error(Errc::PreconditionViolated, "tag edits must not carry a switch");
  if (auto v = validate_reference(switched, edits); !v.empty()) {
    throw Error(Errc::InvalidReference, v.front().message, v.front().field_path);
  }
  const std::size_t n = switched.size();
  std::vector<bool> keep(n, true);
  std::vector<Chars> replaced(n), appended(n);

  for (std::size_t p : edits.deletes) keep[p] = false;
  for (const auto& m : edits.modifies) {
    const std::size_t k = m.span;
    for (std::size_t i = 0; i < k; ++i) keep[m.pos + i] = false;
    // one generated character per span position; the last position also
    // takes any surplus
    const std::size_t one_each = std::min(m.label.size(), k);
    for (std::size_t i = 0; i < one_each; ++i) replaced[m.pos + i] = m.label.substr(i, 1);
    if (m.label.size() > k) replaced[m.pos + k - 1] = m.label.substr(k - 1);
  }
  for (const auto& ins : edits.inserts) appended[ins.pos] += ins.label;

  TagSequence out;
  out.tags.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Tag tag;
    if (keep[i]) {
      tag = appended[i].empty() ? Tag{TagKind::Keep, 0} : Tag{TagKind::Insert, appended[i].size()};
      out.fills += appended[i];
    } else {
      Chars generated = replaced[i] + appended[i];
      if (generated.empty())
        tag = {TagKind::Delete, 0};
      else if (generated.size() == 1)
        tag = {TagKind::Modify, 0};
      else
        tag = {TagKind::ModifyInsert, generated.size() - 1};
      out.fills += generated;
    }
    if (tag.count > max_insert) {
      throw Error(Errc::InsertionTooLong, "character " + std::to_string(i) + " needs " + tag.str() +
                                              " but the maximum is " + std::to_string(max_insert));
    }
    out.tags.push_back(tag);
  }
  return out;
}

std::size_t MaskTemplate::slot_count() const {
  return static_cast<std::size_t>(
      std::count_if(elements.begin(), elements.end(), [](const auto& e) { return !e.has_value(); }));
}

std::string MaskTemplate::render(std::string_view slot) const {
  std::string out;
  for (const auto& e : elements) {
    if (e)
      out += encode_utf8(CharsView(&*e, 1));
    else
      out += slot;
  }
  return out;
}

MaskTemplate build_mask_template(const Sentence& switched, const std::vector<Tag>& tags) {
  if (tags.size() != switched.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(tags.size()) + " tags for a sentence of length " +
                                          std::to_string(switched.size()));
  }
  MaskTemplate m;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    if (t.kind == TagKind::Keep || t.kind == TagKind::Insert) m.elements.emplace_back(switched[i]);
    for (std::size_t k = 0; k < t.mask_slots(); ++k) m.elements.emplace_back(std::nullopt);
  }
  return m;
}

Sentence fill_template(const MaskTemplate& m, CharsView fills) {
  const std::size_t slots = m.slot_count();
  if (slots != fills.size()) {
    throw Error(Errc::FillCountMismatch,
                std::to_string(slots) + " mask slots but " + std::to_string(fills.size()) + " fills");
  }
  Chars out;
  out.reserve(m.elements.size());
  std::size_t next = 0;
  for (const auto& e : m.elements) out.push_back(e ? *e : fills[next++]);
  return Sentence(std::move(out));
}

StgLabels encode_instance(const Sentence& s, const Reference& r, std::size_t max_insert) {
  if (auto v = validate_reference(s, r); !v.empty()) {
    throw Error(Errc::InvalidReference, v.front().message, v.front().field_path);
  }
  const std::size_t n = s.size();
  StgLabels labels;
  labels.pointers = switch_to_pointers(n, r.switch_op);
  const auto order = pointers_to_permutation(labels.pointers);

  std::vector<std::size_t> position(n);  // original index -> switched index
  for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;
  Chars switched_chars(n, U'\0');
  for (std::size_t k = 0; k < n; ++k) switched_chars[k] = s[order[k]];
  const Sentence switched(std::move(switched_chars));

  Reference mapped;
  for (std::size_t p : r.deletes) mapped.deletes.push_back(position[p]);
  for (const auto& ins : r.inserts) {
    InsertItem moved = ins;
    moved.pos = position[ins.pos];
    mapped.inserts.push_back(std::move(moved));
  }
  for (const auto& m : r.modifies) {
    bool contiguous = true;
    for (std::size_t i = 1; i < m.span; ++i)
      if (position[m.pos + i] != position[m.pos] + i) contiguous = false;
    if (contiguous) {
      mapped.modifies.push_back(make_modify(position[m.pos], m.span, m.label));
    } else {
      // the span was scattered by the switch: its first character carries
      // the whole label and the rest are dropped
      mapped.modifies.push_back(make_modify(position[m.pos], 1, m.label));
      for (std::size_t i = 1; i < m.span; ++i) mapped.deletes.push_back(position[m.pos + i]);
    }
  }
  std::sort(mapped.deletes.begin(), mapped.deletes.end());

  labels.tags = encode_tags(switched, mapped, max_insert);
  return labels;
}

Sentence decode_instance(const Sentence& s, const StgLabels& labels) {
  if (labels.pointers.next.size() != s.size()) {
    throw Error(Errc::LengthMismatch, "pointer labels cover " + std::to_string(labels.pointers.next.size()) +
                                          " characters, sentence has " + std::to_string(s.size()));
  }
  const auto order = pointers_to_permutation(labels.pointers);
  Chars switched(s.size(), U'\0');
  for (std::size_t k = 0; k < order.size(); ++k) switched[k] = s[order[k]];
  const auto tmpl = build_mask_template(Sentence(std::move(switched)), labels.tags.tags);
  return fill_template(tmpl, labels.tags.fills);
}

std::size_t required_insert_count(const Reference& r) {
  std::size_t t = 0;
  for (const auto& ins : r.inserts) t = std::max(t, ins.label.size());
  for (const auto& m : r.modifies)
    if (m.label.size() > m.span) t = std::max(t, m.label.size() - m.span);
  return t;
}

Matrix attention_scores(const Matrix& q, const Matrix& k) {
  if (q.cols != k.cols || q.cols == 0 || q.rows != k.rows) {
    throw Error(Errc::DimensionMismatch, "Q is " + std::to_string(q.rows) + "x" + std::to_string(q.cols) +
                                             ", K is " + std::to_string(k.rows) + "x" + std::to_string(k.cols));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols));
  Matrix a(q.rows, k.rows);
  for (std::size_t i = 0; i < q.rows; ++i) {
    double row_max = -INFINITY;
    for (std::size_t j = 0; j < k.rows; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < q.cols; ++c) dot += q(i, c) * k(j, c);
      a(i, j) = dot * scale;
      row_max = std::max(row_max, a(i, j));
    }
    double total = 0.0;
    for (std::size_t j = 0; j < k.rows; ++j) {
      a(i, j) = std::exp(a(i, j) - row_max);
      total += a(i, j);
    }
    for (std::size_t j = 0; j < k.rows; ++j) a(i, j) /= total;
  }
  return a;
}

ScoreMatrix::ScoreMatrix(Matrix m) : n_(m.rows >= 2 ? m.rows - 2 : 0), m_(std::move(m)) {
  if (m_.rows != m_.cols || m_.rows < 2) {
    throw Error(Errc::DimensionMismatch, "score matrix must be square with at least BOS and EOS");
  }
}

namespace {

double log_score(double x) { return std::log(x + kScoreFloor); }

struct Hypothesis {
  std::vector<std::uint64_t> visited;
  std::size_t last;
  double score;
  std::vector<std::size_t> path;
};

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.path < b.path;
}

}  // namespace

double path_score(const ScoreMatrix& a, const std::vector<std::size_t>& order) {
  double total = 0.0;
  std::size_t prev = a.bos();
  for (std::size_t i : order) {
    total += log_score(a(prev, i));
    prev = i;
  }
  return total + log_score(a(prev, a.eos()));
}

std::size_t exhaustive_beam_width(std::size_t n) {
  if (n >= 58) return static_cast<std::size_t>(-1);
  return n * (std::size_t{1} << n);
}

BeamResult beam_decode_permutation(const ScoreMatrix& a, std::size_t beam) {
  const std::size_t n = a.size();
  if (beam == 0) throw Error(Errc::PreconditionViolated, "beam width must be at least 1");
  for (std::size_t from = 0; from <= n; ++from) {
    for (std::size_t to = 0; to < n + 2; ++to) {
      if (to == a.bos() || to == from) continue;
      const double v = a(from, to);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(Errc::DegenerateMatrix, "transition " + std::to_string(from) + "->" + std::to_string(to) +
                                                " has unusable score " + std::to_string(v));
      }
    }
  }

  const std::size_t words = (n + 63) / 64;
  std::vector<Hypothesis> frontier{{std::vector<std::uint64_t>(words, 0), a.bos(), 0.0, {}}};
  for (std::size_t step = 0; step < n; ++step) {
    std::map<std::pair<std::vector<std::uint64_t>, std::size_t>, Hypothesis> merged;
    for (const auto& h : frontier) {
      for (std::size_t j = 0; j < n; ++j) {
        if (h.visited[j / 64] >> (j % 64) & 1U) continue;
        Hypothesis next{h.visited, j, h.score + log_score(a(h.last, j)), h.path};
        next.visited[j / 64] |= std::uint64_t{1} << (j % 64);
        next.path.push_back(j);
        auto key = std::make_pair(next.visited, j);
        auto it = merged.find(key);
        if (it == merged.end())
          merged.emplace(std::move(key), std::move(next));
        else if (better(next, it->second))
          it->second = std::move(next);
      }
    }
    frontier.clear();
    for (auto& [key, h] : merged) frontier.push_back(std::move(h));
    std::sort(frontier.begin(), frontier.end(), better);
    if (frontier.size() > beam) frontier.resize(beam);
  }
  for (auto& h : frontier) h.score += log_score(a(h.last, a.eos()));
  const auto best = std::min_element(frontier.begin(), frontier.end(), better);
  return {best->path, best->score};
}

}  // namespace fcgec::stg
