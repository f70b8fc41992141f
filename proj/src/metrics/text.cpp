#include "radctl/metrics/text.hpp"

#include <cctype>

namespace radctl {

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  std::string current;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalnum(u)) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      out.tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

std::string stem(std::string_view word) {
  std::string w(word);
  auto ends_with = [&](std::string_view suffix) {
    return w.size() >= suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  auto strip = [&](std::size_t n, std::string_view replacement = {}) {
    if (w.size() - n + replacement.size() < 3) return false;
    w.resize(w.size() - n);
    w += replacement;
    return true;
  };
  if (ends_with("sses")) {
    strip(2);
  } else if (ends_with("ies")) {
    strip(3, "y");
  } else if (ends_with("ing")) {
    strip(3);
  } else if (ends_with("ed")) {
    strip(2);
  } else if (ends_with("ly")) {
    strip(2);
  } else if (ends_with("s") && !ends_with("ss")) {
    strip(1);
  }
  return w;
}

}  // namespace radctl
