#include "fcgec/text.hpp"

#include "fcgec/error.hpp"

namespace fcgec {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidReference: return "InvalidReference";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::NoCommonSubstring: return "NoCommonSubstring";
    case Errc::InvalidPermutation: return "InvalidPermutation";
    case Errc::CycleOrOrphan: return "CycleOrOrphan";
    case Errc::InsertionTooLong: return "InsertionTooLong";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::FillCountMismatch: return "FillCountMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateMatrix: return "DegenerateMatrix";
    case Errc::SchemaError: return "SchemaError";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidUtf8: return "InvalidUtf8";
    case Errc::NotAssigned: return "NotAssigned";
    case Errc::TooManyReferences: return "TooManyReferences";
    case Errc::InsufficientSubmissions: return "InsufficientSubmissions";
    case Errc::NotFound: return "NotFound";
    case Errc::Conflict: return "Conflict";
  }
  return "Unknown";
}

Chars decode_utf8(std::string_view bytes) {
  Chars out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  auto bad = [&](const char* why) {
    throw Error(Errc::InvalidUtf8,
                std::string("invalid UTF-8 at byte ") + std::to_string(i) + ": " + why);
  };
  while (i < bytes.size()) {
    auto lead = static_cast<unsigned char>(bytes[i]);
    int extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    } else {
      bad("bad lead byte");
    }
    if (i + static_cast<std::size_t>(extra) >= bytes.size()) bad("truncated sequence");
    for (int k = 1; k <= extra; ++k) {
      auto cont = static_cast<unsigned char>(bytes[i + k]);
      if ((cont & 0xC0) != 0x80) bad("bad continuation byte");
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra]) bad("overlong encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) bad("not a scalar value");
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string encode_utf8(CharsView chars) {
  std::string out;
  out.reserve(chars.size() * 3);
  for (char32_t cp : chars) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

}  // namespace fcgec
