#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "samplebench/sampling/types.hpp"

namespace samplebench {

enum class TokenizerKind { kChar, kWord };

inline std::string_view to_string(TokenizerKind kind) {
  return kind == TokenizerKind::kChar ? "char" : "word";
}

inline std::optional<TokenizerKind> parse_tokenizer_kind(std::string_view name) {
  if (name == "char") return TokenizerKind::kChar;
  if (name == "word") return TokenizerKind::kWord;
  return std::nullopt;
}

namespace detail {

// Length of the UTF-8 sequence starting at `s[i]`, or 1 for a byte that does
// not start a well-formed sequence.
inline std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  const auto lead = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  if (lead >= 0xF0 && lead <= 0xF4) {
    len = 4;
  } else if (lead >= 0xE0) {
    len = lead <= 0xEF ? 3 : 1;
  } else if (lead >= 0xC2) {
    len = 2;
  }
  if (i + len > s.size()) return 1;
  for (std::size_t k = 1; k < len; ++k) {
    if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 1;
  }
  return len;
}

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace detail

/// Character tokens are UTF-8 code points; word tokens are maximal runs of
/// non-whitespace.
inline std::vector<Token> tokenize(TokenizerKind kind, std::string_view text) {
  std::vector<Token> tokens;
  if (kind == TokenizerKind::kChar) {
    for (std::size_t i = 0; i < text.size();) {
      const auto len = detail::utf8_sequence_length(text, i);
      tokens.emplace_back(text.substr(i, len));
      i += len;
    }
    return tokens;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_ascii_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !detail::is_ascii_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

inline std::string detokenize(TokenizerKind kind, const std::vector<Token>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (kind == TokenizerKind::kWord && i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace samplebench
