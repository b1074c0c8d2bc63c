#include "fcgec/model.hpp"

#include <algorithm>

#include "fcgec/error.hpp"

namespace fcgec {

bool Switch::is_identity() const {
  for (std::size_t k = 0; k < order.size(); ++k)
    if (order[k] != k) return false;
  return true;
}

InsertItem make_insert(std::size_t pos, Chars label) {
  InsertItem item;
  item.pos = pos;
  item.count = label.size();
  item.label = std::move(label);
  return item;
}

ModifyItem make_modify(std::size_t pos, std::size_t span, Chars label) {
  return ModifyItem{pos, span, std::move(label)};
}

std::string_view to_string(ErrorType type) {
  switch (type) {
    case ErrorType::IWC: return "IWC";
    case ErrorType::CM: return "CM";
    case ErrorType::CR: return "CR";
    case ErrorType::SC: return "SC";
    case ErrorType::IWO: return "IWO";
    case ErrorType::ILL: return "ILL";
    case ErrorType::AM: return "AM";
  }
  return "?";
}

std::optional<ErrorType> parse_error_type(std::string_view name) {
  for (ErrorType t : kAllErrorTypes)
    if (to_string(t) == name) return t;
  return std::nullopt;
}

bool CorrectionInstance::has_nonempty_reference() const {
  return std::any_of(references.begin(), references.end(),
                     [](const Reference& r) { return !r.empty(); });
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::IndexOutOfRange: return "index out of range";
    case ViolationKind::NotPermutation: return "not a permutation";
    case ViolationKind::NotIncreasing: return "not strictly increasing";
    case ViolationKind::Overlap: return "overlapping spans";
    case ViolationKind::CountMismatch: return "label/count mismatch";
    case ViolationKind::EmptyLabel: return "empty label";
    case ViolationKind::AmbiguousWithSwitch: return "positional edit combined with switch";
  }
  return "?";
}

namespace {

std::string path(std::string_view field, std::size_t index) {
  return std::string(field) + "[" + std::to_string(index) + "]";
}

}  // namespace

std::vector<Violation> validate_reference(const Sentence& s, const Reference& r,
                                          ValidationOptions options) {
  std::vector<Violation> out;
  const std::size_t n = s.size();
  auto report = [&](ViolationKind kind, std::string field, std::string detail) {
    std::string message(to_string(kind));
    if (!detail.empty()) message += ": " + detail;
    out.push_back({kind, std::move(field), std::move(message)});
  };

  if (r.switch_op) {
    const auto& order = r.switch_op->order;
    if (order.size() != n) {
      report(ViolationKind::NotPermutation, "Switch",
             "length " + std::to_string(order.size()) + " != sentence length " + std::to_string(n));
    }
    std::vector<bool> seen(n, false);
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (order[k] >= n) {
        report(ViolationKind::IndexOutOfRange, path("Switch", k), std::to_string(order[k]));
      } else if (seen[order[k]]) {
        report(ViolationKind::NotPermutation, path("Switch", k),
               "duplicate index " + std::to_string(order[k]));
      } else {
        seen[order[k]] = true;
      }
    }
  }

  // owner[i] records which item consumes original character i
  std::vector<int> owner(n, -1);
  int next_owner = 0;
  auto claim = [&](std::size_t i, const std::string& field) {
    if (owner[i] >= 0) {
      report(ViolationKind::Overlap, field, "character " + std::to_string(i) + " already edited");
    }
    owner[i] = next_owner;
  };

  for (std::size_t k = 0; k < r.deletes.size(); ++k) {
    std::size_t p = r.deletes[k];
    if (p >= n) {
      report(ViolationKind::IndexOutOfRange, path("Delete", k), std::to_string(p));
      continue;
    }
    if (k > 0 && r.deletes[k - 1] >= p) report(ViolationKind::NotIncreasing, path("Delete", k), "");
    claim(p, path("Delete", k));
    ++next_owner;
  }

  // modify interiors: boundary after i is inside a span when i is not its last char
  std::vector<bool> interior(n, false);
  for (std::size_t k = 0; k < r.modifies.size(); ++k) {
    const auto& m = r.modifies[k];
    const std::string field = path("Modify", k);
    if (m.label.empty()) report(ViolationKind::EmptyLabel, field + ".label", "");
    if (m.span == 0) {
      report(ViolationKind::CountMismatch, field + ".span", "span must be positive");
      continue;
    }
    if (m.pos >= n || m.pos + m.span > n) {
      report(ViolationKind::IndexOutOfRange, field + ".pos",
             std::to_string(m.pos) + "+" + std::to_string(m.span) + " > " + std::to_string(n));
      continue;
    }
    for (std::size_t i = m.pos; i < m.pos + m.span; ++i) {
      claim(i, field);
      if (i + 1 < m.pos + m.span) interior[i] = true;
    }
    ++next_owner;
  }

  for (std::size_t k = 0; k < r.inserts.size(); ++k) {
    const auto& ins = r.inserts[k];
    const std::string field = path("Insert", k);
    if (ins.pos >= n) {
      report(ViolationKind::IndexOutOfRange, field + ".pos", std::to_string(ins.pos));
      continue;
    }
    if (ins.label.empty() || ins.count == 0) report(ViolationKind::EmptyLabel, field + ".label", "");
    if (ins.count != ins.label.size()) {
      report(ViolationKind::CountMismatch, field,
             "INS_" + std::to_string(ins.count) + " with " + std::to_string(ins.label.size()) +
                 " label characters");
    }
    if (interior[ins.pos]) {
      report(ViolationKind::Overlap, field, "insertion point inside a modified span");
    }
  }

  if (options.strict && r.switch_op && !r.switch_op->is_identity() &&
      (!r.deletes.empty() || !r.inserts.empty() || !r.modifies.empty())) {
    report(ViolationKind::AmbiguousWithSwitch, "Switch",
           "positions may refer to the pre- or post-switch sentence");
  }
  return out;
}

Sentence apply_reference(const Sentence& s, const Reference& r) {
  auto violations = validate_reference(s, r);
  if (!violations.empty()) {
    throw Error(Errc::InvalidReference, violations.front().message, violations.front().field_path);
  }
  if (r.empty()) return s;

  const std::size_t n = s.size();
  enum class Fate : unsigned char { Keep, Drop, Replace };
  std::vector<Fate> fate(n, Fate::Keep);
  std::vector<const Chars*> replacement(n, nullptr);
  std::vector<std::vector<const Chars*>> appended(n);

  for (std::size_t p : r.deletes) fate[p] = Fate::Drop;
  for (const auto& m : r.modifies) {
    fate[m.pos] = Fate::Replace;
    replacement[m.pos] = &m.label;
    for (std::size_t i = m.pos + 1; i < m.pos + m.span; ++i) fate[i] = Fate::Drop;
  }
  for (const auto& ins : r.inserts) appended[ins.pos].push_back(&ins.label);

  Chars out;
  out.reserve(n + 8);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = r.switch_op ? r.switch_op->order[k] : k;
    switch (fate[i]) {
      case Fate::Keep: out.push_back(s[i]); break;
      case Fate::Replace: out += *replacement[i]; break;
      case Fate::Drop: break;
    }
    for (const Chars* label : appended[i]) out += *label;
  }
  return Sentence(std::move(out));
}

std::size_t op_count(const Reference& r) {
  std::size_t count = (r.switch_op && !r.switch_op->is_identity()) ? 1 : 0;
  return count + r.deletes.size() + r.inserts.size() + r.modifies.size();
}

std::size_t char_cost(const Reference& r) {
  std::size_t cost = r.deletes.size();
  for (const auto& ins : r.inserts) cost += ins.label.size();
  for (const auto& m : r.modifies) cost += std::max(m.span, m.label.size());
  return cost;
}

}  // namespace fcgec
