#include "fcgec/min_edit.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>

#include "fcgec/error.hpp"

namespace fcgec {

namespace {

// Longest common substring of s and t avoiding the masked positions.
std::optional<SubstringMatch> longest_common(CharsView s, CharsView t, const std::vector<bool>& s_mask,
                                             const std::vector<bool>& t_mask) {
  const std::size_t n = s.size();
  const std::size_t m = t.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  SubstringMatch best;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (s[i - 1] == t[j - 1] && !s_mask[i - 1] && !t_mask[j - 1]) {
        cur[j] = prev[j - 1] + 1;
        const std::size_t len = cur[j];
        const std::size_t si = i - len;
        const std::size_t ti = j - len;
        // strictly longer wins; equal length keeps the earlier source start,
        // then the earlier target start
        if (len > best.length ||
            (len == best.length && (si < best.source_start ||
                                    (si == best.source_start && ti < best.target_start)))) {
          best = {si, ti, len};
        }
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  if (best.length == 0) return std::nullopt;
  return best;
}

bool same_multiset(CharsView a, CharsView b) {
  if (a.size() != b.size()) return false;
  Chars x(a), y(b);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

// Exchanges blocks [a, a+la) and [b, b+lb) of `seq` (blocks disjoint).
std::vector<std::size_t> swap_blocks(const std::vector<std::size_t>& seq, std::size_t a, std::size_t la,
                                     std::size_t b, std::size_t lb) {
  if (a > b) {
    std::swap(a, b);
    std::swap(la, lb);
  }
  std::vector<std::size_t> out;
  out.reserve(seq.size());
  out.insert(out.end(), seq.begin(), seq.begin() + a);
  out.insert(out.end(), seq.begin() + b, seq.begin() + b + lb);
  out.insert(out.end(), seq.begin() + a + la, seq.begin() + b);
  out.insert(out.end(), seq.begin() + a, seq.begin() + a + la);
  out.insert(out.end(), seq.begin() + b + lb, seq.end());
  return out;
}

bool realizes(CharsView s, const std::vector<std::size_t>& order, CharsView t) {
  for (std::size_t k = 0; k < order.size(); ++k)
    if (s[order[k]] != t[k]) return false;
  return true;
}

Reference switch_reference(std::vector<std::size_t> order) {
  Reference r;
  r.switch_op = Switch{std::move(order)};
  return r;
}

// Lexicographic (edit cost, operation count).
struct Cost {
  std::int32_t edits = std::numeric_limits<std::int32_t>::max() / 2;
  std::int32_t ops = 0;
  friend bool operator==(const Cost&, const Cost&) = default;
  friend auto operator<=>(const Cost&, const Cost&) = default;
};

constexpr Cost kInfinity{};

// Alignment modes. A maximal run of non-copy moves becomes either a plain
// Delete (every character counts) or a single Insert/Modify item.
enum Mode : int {
  kIdle = 0,       // after a copy, or at the start
  kDeleting = 1,   // pure-delete run, one op per character
  kPending = 2,    // run that will emit output but has not yet
  kEmitting = 3,   // run with output
  kLeading = 4,    // run at sentence start with output but no source char yet
  kModes = 5,
};

struct Transition {
  Mode from;
  Mode to;
  std::int32_t ops;
};

// Transition tables per move, listed in the predecessor preference order
// used when backtracking.
constexpr std::array<Transition, 4> kModifyTransitions{{
    {kIdle, kEmitting, 1}, {kEmitting, kEmitting, 0}, {kPending, kEmitting, 0}, {kLeading, kEmitting, 0}}};
constexpr std::array<Transition, 6> kDeleteTransitions{{{kIdle, kDeleting, 1},
                                                        {kIdle, kPending, 1},
                                                        {kEmitting, kEmitting, 0},
                                                        {kPending, kPending, 0},
                                                        {kDeleting, kDeleting, 1},
                                                        {kLeading, kEmitting, 0}}};
// Insert from idle goes to kLeading at i == 0, otherwise kEmitting.
constexpr std::array<Transition, 4> kInsertTransitions{{
    {kIdle, kEmitting, 1}, {kEmitting, kEmitting, 0}, {kPending, kEmitting, 0}, {kLeading, kLeading, 0}}};
constexpr std::array<Mode, 3> kCopyFrom{kIdle, kEmitting, kDeleting};
constexpr std::array<Mode, 3> kFinalModes{kIdle, kEmitting, kDeleting};

Cost plus(Cost c, std::int32_t edits, std::int32_t ops) {
  if (c == kInfinity) return c;
  return {c.edits + edits, c.ops + ops};
}

}  // namespace

CommonSubstringPair longest_common_substring_pair(CharsView source, CharsView target) {
  std::vector<bool> s_mask(source.size(), false), t_mask(target.size(), false);
  auto first = longest_common(source, target, s_mask, t_mask);
  if (!first) throw Error(Errc::NoCommonSubstring, "no common character between source and target");
  for (std::size_t k = 0; k < first->length; ++k) {
    s_mask[first->source_start + k] = true;
    t_mask[first->target_start + k] = true;
  }
  return {*first, longest_common(source, target, s_mask, t_mask)};
}

std::optional<Reference> try_switch_derivation(const Sentence& s, const Sentence& t) {
  if (!same_multiset(s.view(), t.view())) {
    throw Error(Errc::PreconditionViolated, "character frequencies of source and target differ");
  }
  if (s == t) return std::nullopt;

  const std::size_t n = s.size();
  std::size_t prefix = 0;
  while (prefix < n && s[prefix] == t[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < n - prefix && s[n - 1 - suffix] == t[n - 1 - suffix]) ++suffix;
  const std::size_t len = n - prefix - suffix;
  const CharsView mid_s = s.view().substr(prefix, len);
  const CharsView mid_t = t.view().substr(prefix, len);

  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  std::vector<std::size_t> head(identity.begin(), identity.begin() + prefix);
  std::vector<std::size_t> mid(identity.begin() + prefix, identity.begin() + prefix + len);
  std::vector<std::size_t> tail(identity.begin() + prefix + len, identity.end());
  auto assemble = [&](const std::vector<std::size_t>& middle) {
    std::vector<std::size_t> order = head;
    order.insert(order.end(), middle.begin(), middle.end());
    order.insert(order.end(), tail.begin(), tail.end());
    return order;
  };

  std::optional<CommonSubstringPair> pair;
  try {
    pair = longest_common_substring_pair(mid_s, mid_t);
  } catch (const Error&) {
  }
  if (pair && pair->second) {
    const auto& a = pair->first;
    const auto& b = *pair->second;
    auto order = assemble(swap_blocks(mid, a.source_start, a.length, b.source_start, b.length));
    if (realizes(s.view(), order, t.view())) return switch_reference(std::move(order));
  }

  // Exhaustive split of the middle into X M Y with t's middle = Y M X.
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t a = 1; a < len; ++a) {
    for (std::size_t b = 1; a + b <= len; ++b) {
      if (mid_s.substr(len - b) != mid_t.substr(0, b)) continue;
      if (mid_s.substr(0, a) != mid_t.substr(len - a)) continue;
      if (mid_s.substr(a, len - a - b) != mid_t.substr(b, len - a - b)) continue;
      if (!best || std::max(a, b) > std::max(best->first, best->second)) best = {{a, b}};
    }
  }
  if (!best) return std::nullopt;
  auto [a, b] = *best;
  auto order = assemble(swap_blocks(mid, 0, a, len - b, b));
  return switch_reference(std::move(order));
}

std::vector<AlignedMove> align(CharsView s, CharsView t) {
  const std::size_t n = s.size();
  const std::size_t m = t.size();
  const std::size_t width = m + 1;
  std::vector<std::array<Cost, kModes>> table((n + 1) * width);
  for (auto& cell : table) cell.fill(kInfinity);
  auto at = [&](std::size_t i, std::size_t j) -> std::array<Cost, kModes>& { return table[i * width + j]; };

  at(0, 0)[kIdle] = Cost{0, 0};
  auto relax = [](Cost& slot, Cost candidate) {
    if (candidate < slot) slot = candidate;
  };
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      const auto& here = at(i, j);
      if (i < n && j < m) {
        auto& diag = at(i + 1, j + 1);
        if (s[i] == t[j])
          for (Mode from : kCopyFrom) relax(diag[kIdle], plus(here[from], 0, 0));
        for (const auto& tr : kModifyTransitions) relax(diag[tr.to], plus(here[tr.from], 1, tr.ops));
      }
      if (i < n) {
        auto& down = at(i + 1, j);
        for (const auto& tr : kDeleteTransitions) relax(down[tr.to], plus(here[tr.from], 1, tr.ops));
      }
      if (j < m) {
        auto& right = at(i, j + 1);
        for (const auto& tr : kInsertTransitions) {
          Mode to = (tr.from == kIdle && i == 0) ? kLeading : tr.to;
          relax(right[to], plus(here[tr.from], 1, tr.ops));
        }
      }
    }
  }

  Mode mode = kIdle;
  Cost goal = kInfinity;
  for (Mode candidate : kFinalModes) {
    if (at(n, m)[candidate] < goal) {
      goal = at(n, m)[candidate];
      mode = candidate;
    }
  }

  std::vector<AlignedMove> moves;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const Cost here = at(i, j)[mode];
    bool stepped = false;
    // Copy
    if (!stepped && mode == kIdle && i > 0 && j > 0 && s[i - 1] == t[j - 1]) {
      for (Mode from : kCopyFrom) {
        if (plus(at(i - 1, j - 1)[from], 0, 0) == here) {
          moves.push_back({EditMove::Copy, i - 1, j - 1});
          --i, --j, mode = from, stepped = true;
          break;
        }
      }
    }
    // Modify
    if (!stepped && i > 0 && j > 0) {
      for (const auto& tr : kModifyTransitions) {
        if (tr.to == mode && plus(at(i - 1, j - 1)[tr.from], 1, tr.ops) == here) {
          moves.push_back({EditMove::Modify, i - 1, j - 1});
          --i, --j, mode = tr.from, stepped = true;
          break;
        }
      }
    }
    // Delete
    if (!stepped && i > 0) {
      for (const auto& tr : kDeleteTransitions) {
        if (tr.to == mode && plus(at(i - 1, j)[tr.from], 1, tr.ops) == here) {
          moves.push_back({EditMove::Delete, i - 1, j});
          --i, mode = tr.from, stepped = true;
          break;
        }
      }
    }
    // Insert
    if (!stepped && j > 0) {
      for (const auto& tr : kInsertTransitions) {
        Mode to = (tr.from == kIdle && i == 0) ? kLeading : tr.to;
        if (to == mode && plus(at(i, j - 1)[tr.from], 1, tr.ops) == here) {
          moves.push_back({EditMove::Insert, i, j - 1});
          --j, mode = tr.from, stepped = true;
          break;
        }
      }
    }
    if (!stepped) throw Error(Errc::PreconditionViolated, "edit path backtrack reached a dead cell");
  }
  std::reverse(moves.begin(), moves.end());
  return moves;
}

Reference derive_edit_path(const Sentence& s, const Sentence& t) {
  Reference r;
  if (s == t) return r;
  const auto moves = align(s.view(), t.view());

  auto flush = [&](std::size_t src_begin, std::size_t src_end, const Chars& output) {
    if (output.empty()) {
      for (std::size_t p = src_begin; p < src_end; ++p) r.deletes.push_back(p);
    } else if (src_begin == src_end) {
      r.inserts.push_back(make_insert(src_begin - 1, output));
    } else {
      r.modifies.push_back(make_modify(src_begin, src_end - src_begin, output));
    }
  };

  bool in_run = false;
  std::size_t run_begin = 0, run_end = 0;
  Chars output;
  for (const auto& mv : moves) {
    if (mv.move == EditMove::Copy) {
      if (in_run) flush(run_begin, run_end, output);
      in_run = false;
      continue;
    }
    if (!in_run) {
      in_run = true;
      run_begin = run_end = mv.source;
      output.clear();
    }
    if (mv.move != EditMove::Insert) run_end = mv.source + 1;
    if (mv.move != EditMove::Delete) output.push_back(t[mv.target]);
  }
  if (in_run) flush(run_begin, run_end, output);
  return r;
}

Reference derive_operations(const Sentence& s, const Sentence& t) {
  if (s == t) return {};
  if (same_multiset(s.view(), t.view())) {
    if (auto swapped = try_switch_derivation(s, t)) return *swapped;
  }
  return derive_edit_path(s, t);
}

Reference normalize_reference(const Sentence& s, const Reference& r) {
  return derive_operations(s, apply_reference(s, r));
}

std::size_t levenshtein_distance(CharsView a, CharsView b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace fcgec
