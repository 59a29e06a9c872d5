#pragma once

// Sentence segmentation, tokenization and n-gram counting over UTF-8 text.
//
// The rules are deliberately small: no dictionary-based word segmentation,
// tokens are syllables (maximal runs of letters, digits and combining marks),
// lowercased with a built-in case table that covers ASCII, Latin-1,
// Latin Extended-A/B (Vietnamese horn letters), Latin Extended Additional
// (the precomposed Vietnamese vowels), basic Greek and Cyrillic.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sgsum {

using Tokens = std::vector<std::string>;
using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

namespace utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Malformed sequences decode to U+FFFD, one per offending byte.
inline std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append(std::string& out, char32_t cp) {
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

inline std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append(out, cp);
  return out;
}

}  // namespace utf8

namespace unicode {

inline char32_t to_lower(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x137) {
    if (c == 0x130) return U'i';
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0x139 && c <= 0x148) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return (c % 2 == 0) ? c + 1 : c;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c % 2 == 1) ? c + 1 : c;
  if (c == 0x1A0 || c == 0x1AF) return c + 1;  // Ơ Ư
  if (c >= 0x1E00 && c <= 0x1E95) return (c % 2 == 0) ? c + 1 : c;
  if (c == 0x1E9E) return 0xDF;
  if (c >= 0x1EA0 && c <= 0x1EFF) return (c % 2 == 0) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

inline bool is_upper(char32_t c) { return to_lower(c) != c; }

// Inverse of to_lower over the same table.
inline char32_t to_upper(char32_t c) {
  if (c == 0xFF) return 0x178;
  for (char32_t delta : {char32_t{32}, char32_t{1}, char32_t{80}}) {
    if (c >= delta && to_lower(c - delta) == c && c - delta != c) return c - delta;
  }
  return c;
}

inline bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

inline bool is_space(char32_t c) {
  return c == ' ' || (c >= 0x09 && c <= 0x0D) || c == 0x85 || c == 0xA0 ||
         (c >= 0x2000 && c <= 0x200B) || c == 0x2028 || c == 0x2029 ||
         c == 0x202F || c == 0x205F || c == 0x3000 || c == 0xFEFF;
}

// Letters, digits and combining marks. Everything in the known punctuation
// and symbol blocks is a separator.
inline bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z');
  }
  if (is_space(c)) return false;
  if (c <= 0xBF) return false;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x206F) return false;
  if (c >= 0x20A0 && c <= 0x20CF) return false;
  if (c >= 0x2100 && c <= 0x2BFF) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  if (c >= 0xFF1A && c <= 0xFF20) return false;
  if (c >= 0xFF3B && c <= 0xFF40) return false;
  if (c >= 0xFF5B && c <= 0xFF65) return false;
  if (c == utf8::kReplacement) return false;
  return true;
}

}  // namespace unicode

namespace detail {

inline bool is_terminal(char32_t c) {
  return c == '.' || c == '!' || c == '?' || c == 0x2026;
}

inline bool is_closing(char32_t c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}' ||
         c == 0xBB || c == 0x2019 || c == 0x201D;
}

inline bool is_opening(char32_t c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == 0xAB ||
         c == 0x2018 || c == 0x201C;
}

// Lowercased forms of words that end with a period without ending a
// sentence.
inline bool is_abbreviation(std::u32string_view word) {
  static const std::array<std::u32string_view, 19> kAbbrev = {
      U"mr", U"mrs", U"ms", U"dr", U"prof", U"st", U"jr", U"sr",
      U"vs", U"etc", U"no", U"tp", U"ths", U"ts", U"pgs", U"gs",
      U"bs", U"e.g", U"i.e"};
  std::u32string lowered(word);
  for (auto& c : lowered) c = unicode::to_lower(c);
  return std::find(kAbbrev.begin(), kAbbrev.end(), lowered) != kAbbrev.end();
}

inline std::u32string_view trim(std::u32string_view s) {
  while (!s.empty() && unicode::is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && unicode::is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Splits after terminal punctuation (optionally followed by closing quotes or
// brackets) when whitespace and then an uppercase letter or digit follows.
// Known abbreviations and single uppercase initials do not end a sentence.
inline std::vector<std::string> segment_sentences(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  const std::size_t n = cps.size();
  std::vector<std::string> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    auto piece = detail::trim(std::u32string_view(cps).substr(begin, end - begin));
    if (!piece.empty()) out.push_back(utf8::encode(piece));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!detail::is_terminal(cps[i])) {
      ++i;
      continue;
    }
    const std::size_t punct = i;
    std::size_t j = i + 1;
    while (j < n && detail::is_terminal(cps[j])) ++j;
    while (j < n && detail::is_closing(cps[j])) ++j;
    if (j >= n || !unicode::is_space(cps[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < n && unicode::is_space(cps[k])) ++k;
    std::size_t head = k;
    while (head < n && detail::is_opening(cps[head])) ++head;
    const bool starts_new = head < n && (unicode::is_upper(cps[head]) ||
                                         unicode::is_digit(cps[head]));
    bool guarded = false;
    if (cps[punct] == '.' && j == punct + 1) {
      std::size_t w = punct;
      while (w > start && (unicode::is_word_char(cps[w - 1]) || cps[w - 1] == '.')) --w;
      const std::u32string_view word(cps.data() + w, punct - w);
      guarded = detail::is_abbreviation(word) ||
                (word.size() == 1 && unicode::is_upper(word[0]));
    }
    if (starts_new && !guarded) {
      emit(start, j);
      start = k;
    }
    i = k;
  }
  if (start < n) emit(start, n);
  return out;
}

// Lowercased syllable tokens; punctuation and symbols are separators and
// never become tokens.
inline Tokens tokenize(std::string_view sentence) {
  const std::u32string cps = utf8::decode(sentence);
  Tokens tokens;
  std::u32string current;
  for (char32_t c : cps) {
    if (unicode::is_word_char(c)) {
      current.push_back(unicode::to_lower(c));
    } else if (!current.empty()) {
      tokens.push_back(utf8::encode(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(utf8::encode(current));
  return tokens;
}

inline std::string join(const Tokens& tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

inline NgramCounts ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

inline std::size_t total_count(const NgramCounts& counts) {
  std::size_t total = 0;
  for (const auto& [gram, c] : counts) total += c;
  return total;
}

}  // namespace sgsum
