#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fcgec/model.hpp"
#include "fcgec/text.hpp"

namespace fcgec::stg {

inline constexpr std::size_t kDefaultMaxInsert = 6;
inline constexpr std::size_t kDefaultBeamWidth = 5;

// Next-character form of a Switch. `next[i] == n` marks the last character.
struct PointerLabels {
  std::size_t first = 0;
  std::vector<std::size_t> next;

  std::size_t end() const { return next.size(); }
  friend bool operator==(const PointerLabels&, const PointerLabels&) = default;
};

PointerLabels switch_to_pointers(std::size_t n, const std::optional<Switch>& sw);
std::vector<std::size_t> pointers_to_permutation(const PointerLabels& p);

enum class TagKind : unsigned char { Keep, Delete, Insert, Modify, ModifyInsert };

struct Tag {
  TagKind kind = TagKind::Keep;
  std::size_t count = 0;  // t for I_t and MI_t, 0 otherwise

  std::size_t mask_slots() const;
  std::string str() const;  // K, D, I_t, M, MI_t
  static Tag parse(std::string_view text);
  friend bool operator==(const Tag&, const Tag&) = default;
};

struct TagSequence {
  std::vector<Tag> tags;
  Chars fills;
  friend bool operator==(const TagSequence&, const TagSequence&) = default;
};

std::size_t mask_count(const std::vector<Tag>& tags);

/// Tags the switched sentence. `edits` holds Delete/Insert/Modify items whose
/// positions index the switched sentence; it must not carry a Switch.
/// Throws Error(InsertionTooLong) when a tag would need t > max_insert.
TagSequence encode_tags(const Sentence& switched, const Reference& edits,
                        std::size_t max_insert = kDefaultMaxInsert);

// A literal code point, or an empty optional for a mask slot.
struct MaskTemplate {
  std::vector<std::optional<char32_t>> elements;
  std::size_t slot_count() const;
  std::string render(std::string_view slot = "[MASK]") const;
  friend bool operator==(const MaskTemplate&, const MaskTemplate&) = default;
};

MaskTemplate build_mask_template(const Sentence& switched, const std::vector<Tag>& tags);
Sentence fill_template(const MaskTemplate& m, CharsView fills);

struct StgLabels {
  PointerLabels pointers;
  TagSequence tags;
  friend bool operator==(const StgLabels&, const StgLabels&) = default;
};

StgLabels encode_instance(const Sentence& s, const Reference& r,
                          std::size_t max_insert = kDefaultMaxInsert);
Sentence decode_instance(const Sentence& s, const StgLabels& labels);

/// Largest t any item of `r` needs when encoded on its own (0 for none).
std::size_t required_insert_count(const Reference& r);

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// softmax(Q Kᵀ / √d), row-wise.
Matrix attention_scores(const Matrix& q, const Matrix& k);

inline constexpr double kScoreFloor = 1e-12;

/// (n+2)×(n+2) successor scores; index n is BOS, n+1 is EOS.
class ScoreMatrix {
 public:
  explicit ScoreMatrix(std::size_t n, double fill = 0.0) : n_(n), m_(n + 2, n + 2, fill) {}
  explicit ScoreMatrix(Matrix m);

  std::size_t size() const { return n_; }
  std::size_t bos() const { return n_; }
  std::size_t eos() const { return n_ + 1; }
  double& operator()(std::size_t from, std::size_t to) { return m_(from, to); }
  double operator()(std::size_t from, std::size_t to) const { return m_(from, to); }
  const Matrix& matrix() const { return m_; }

 private:
  std::size_t n_;
  Matrix m_;
};

/// Σ log(A(prev, next) + floor) over BOS → order... → EOS.
double path_score(const ScoreMatrix& a, const std::vector<std::size_t>& order);

struct BeamResult {
  std::vector<std::size_t> order;
  double score = 0.0;
};

/// Beam search over successor chains that never revisits an index. Partial
/// paths ending in the same (visited set, last index) state are merged, so a
/// beam of at least n·2ⁿ keeps every state and the result is exact.
BeamResult beam_decode_permutation(const ScoreMatrix& a, std::size_t beam = kDefaultBeamWidth);

std::size_t exhaustive_beam_width(std::size_t n);

}  // namespace fcgec::stg
