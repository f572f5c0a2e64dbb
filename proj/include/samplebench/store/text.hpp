#pragma once

#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utypes.h>

namespace samplebench {

/// Key under which prompts are grouped: Unicode NFC, trailing whitespace
/// removed. Malformed UTF-8 is passed through ICU's replacement handling.
inline std::string normalize_prompt(std::string_view prompt) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(prompt.data(), static_cast<int32_t>(prompt.size())));
  icu::UnicodeString normalized;
  if (U_SUCCESS(status)) normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) normalized = text;

  int32_t end = normalized.length();
  while (end > 0) {
    const UChar32 c = normalized.char32At(end - 1);
    if (!u_isUWhiteSpace(c)) break;
    end = normalized.moveIndex32(end, -1);
  }
  normalized.truncate(end);

  std::string out;
  normalized.toUTF8String(out);
  return out;
}

/// True when `s` holds nothing but whitespace.
inline bool is_blank(std::string_view s) {
  const icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  for (int32_t i = 0; i < text.length(); i = text.moveIndex32(i, 1)) {
    if (!u_isUWhiteSpace(text.char32At(i))) return false;
  }
  return true;
}

}  // namespace samplebench
