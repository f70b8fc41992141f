#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace radctl {

/// Lowercase word tokens; never contains empty strings.
struct TokenizedText {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  friend bool operator==(const TokenizedText&, const TokenizedText&) = default;
};

/// Maximal runs of ASCII letters and digits, lowercased. Everything else is
/// a separator and is dropped, so "post-operative" -> [post, operative] and
/// "2.5cm" -> [2, 5cm].
TokenizedText tokenize(std::string_view text);

/// Suffix-stripping stemmer used for METEOR stem matches. Applies the first
/// matching rule: -sses -> -ss, -ies -> -y, -ing, -ed, -ly, -s (not -ss);
/// a stem must keep at least three characters.
std::string stem(std::string_view word);

}  // namespace radctl
