#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace fcgec {

using Chars = std::u32string;
using CharsView = std::u32string_view;

// Strict UTF-8 codec. Throws Error(InvalidUtf8) on malformed input.
Chars decode_utf8(std::string_view bytes);
std::string encode_utf8(CharsView chars);

// A sentence is an immutable sequence of Unicode code points. Indexing is
// 0-based by code point.
class Sentence {
 public:
  Sentence() = default;
  explicit Sentence(Chars chars) : chars_(std::move(chars)) {}

  static Sentence from_utf8(std::string_view bytes) { return Sentence(decode_utf8(bytes)); }

  std::size_t size() const noexcept { return chars_.size(); }
  bool empty() const noexcept { return chars_.empty(); }
  char32_t operator[](std::size_t i) const { return chars_[i]; }

  const Chars& chars() const noexcept { return chars_; }
  CharsView view() const noexcept { return chars_; }
  std::string utf8() const { return encode_utf8(chars_); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
  friend auto operator<=>(const Sentence&, const Sentence&) = default;

 private:
  Chars chars_;
};

}  // namespace fcgec
