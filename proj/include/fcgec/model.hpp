#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcgec/text.hpp"

namespace fcgec {

/// Reorders the whole sentence. `order[k]` is the original index of the
/// character that ends up at output position k.
struct Switch {
  std::vector<std::size_t> order;
  bool is_identity() const;
  friend bool operator==(const Switch&, const Switch&) = default;
};

/// Emits `label` immediately after the original character at `pos`.
/// `count` mirrors the INS_k tag and must equal the label length.
struct InsertItem {
  std::size_t pos = 0;
  std::size_t count = 0;
  Chars label;
  friend bool operator==(const InsertItem&, const InsertItem&) = default;
};

/// Replaces the `span` original characters starting at `pos` by `label`.
struct ModifyItem {
  std::size_t pos = 0;
  std::size_t span = 1;
  Chars label;
  friend bool operator==(const ModifyItem&, const ModifyItem&) = default;
};

/// One complete correction of a sentence. Delete/Insert/Modify positions
/// always refer to the original (unswitched) sentence.
struct Reference {
  std::optional<Switch> switch_op;
  std::vector<std::size_t> deletes;
  std::vector<InsertItem> inserts;
  std::vector<ModifyItem> modifies;

  bool empty() const { return !switch_op && deletes.empty() && inserts.empty() && modifies.empty(); }
  friend bool operator==(const Reference&, const Reference&) = default;
};

InsertItem make_insert(std::size_t pos, Chars label);
ModifyItem make_modify(std::size_t pos, std::size_t span, Chars label);

enum class ErrorType { IWC, CM, CR, SC, IWO, ILL, AM };

inline constexpr ErrorType kAllErrorTypes[] = {ErrorType::IWC, ErrorType::CM,  ErrorType::CR,
                                               ErrorType::SC,  ErrorType::IWO, ErrorType::ILL,
                                               ErrorType::AM};

std::string_view to_string(ErrorType type);
std::optional<ErrorType> parse_error_type(std::string_view name);

struct CorrectionInstance {
  std::string id;
  Sentence sentence;
  bool error_flag = false;
  std::vector<ErrorType> error_types;  // sorted, unique
  std::vector<Reference> references;
  std::string external;  // compact JSON text, kept opaque

  bool has_nonempty_reference() const;
  friend bool operator==(const CorrectionInstance&, const CorrectionInstance&) = default;
};

enum class ViolationKind {
  IndexOutOfRange,
  NotPermutation,
  NotIncreasing,
  Overlap,
  CountMismatch,
  EmptyLabel,
  AmbiguousWithSwitch,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string field_path;
  std::string message;
};

struct ValidationOptions {
  // Flags references that combine a Switch with positional edits. Their
  // positions are read as original indices, but annotators may have meant
  // post-switch indices; strict mode surfaces these for review.
  bool strict = false;
};

std::vector<Violation> validate_reference(const Sentence& s, const Reference& r,
                                          ValidationOptions options = {});

/// Applies a reference in three phases: attach edits to original indices,
/// reorder by the switch, then realize the edits in output order.
/// Throws Error(InvalidReference) when validation fails.
Sentence apply_reference(const Sentence& s, const Reference& r);

/// Switch (when non-identity) counts once; every Delete position, Insert item
/// and Modify item counts once.
std::size_t op_count(const Reference& r);

/// Replaced + inserted + deleted characters: deletes count 1 each, inserts
/// their label length, a k-to-m modify max(k, m). Switch is free.
std::size_t char_cost(const Reference& r);

}  // namespace fcgec
