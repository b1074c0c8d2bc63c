#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fcgec/model.hpp"
#include "fcgec/text.hpp"

namespace fcgec {

struct SubstringMatch {
  std::size_t source_start = 0;
  std::size_t target_start = 0;
  std::size_t length = 0;
  friend bool operator==(const SubstringMatch&, const SubstringMatch&) = default;
};

struct CommonSubstringPair {
  SubstringMatch first;
  // Longest common substring whose occurrences are disjoint from `first` in
  // both strings; absent when nothing common remains.
  std::optional<SubstringMatch> second;
};

/// Ties go to the leftmost start in the source, then in the target.
/// Throws Error(NoCommonSubstring) when the strings share no code point.
CommonSubstringPair longest_common_substring_pair(CharsView source, CharsView target);

/// Detects a single two-block swap turning `s` into `t`.
///
/// The common prefix and suffix are trimmed first; the longest common
/// substring pair of the remaining middles is tried as the swapped blocks.
/// When that pair does not reproduce `t`, every split of the middle into
/// X M Y is checked for t = Y M X, preferring the longest block. Returns
/// absent for identical inputs or when no two-block swap exists.
/// Throws Error(PreconditionViolated) if the character multisets differ.
std::optional<Reference> try_switch_derivation(const Sentence& s, const Sentence& t);

enum class EditMove : unsigned char { Copy, Modify, Delete, Insert };

struct AlignedMove {
  EditMove move;
  std::size_t source;  // source index consumed (Copy/Modify/Delete) or insertion boundary
  std::size_t target;  // target index produced (Copy/Modify/Insert)
};

/// Minimum-edit alignment of s to t. The path minimises the edit cost and,
/// among minimum-cost paths, the number of operations the merged labels will
/// need; backtracking from (|s|, |t|) takes the first admissible move in the
/// order Copy, Modify, Delete, Insert. Insertions before the first source
/// character are never emitted on their own (they cannot be anchored), so a
/// leading insertion is folded into a Modify of the first character.
std::vector<AlignedMove> align(CharsView s, CharsView t);

/// Levenshtein route only: merges runs of non-copy moves into operations.
Reference derive_edit_path(const Sentence& s, const Sentence& t);

/// Minimal operation labels converting s into t: empty if equal, a single
/// Switch when a two-block swap suffices, otherwise the merged edit path.
/// Always satisfies apply_reference(s, result) == t.
Reference derive_operations(const Sentence& s, const Sentence& t);

/// derive_operations(s, apply_reference(s, r)).
Reference normalize_reference(const Sentence& s, const Reference& r);

std::size_t levenshtein_distance(CharsView a, CharsView b);

}  // namespace fcgec
