#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "apidomain/common/text.hpp"
#include "apidomain/corpus/stemmer.hpp"
#include "apidomain/corpus/stopwords.hpp"

namespace apidomain {

namespace detail {

// Fenced blocks (an unterminated fence runs to the end) and inline spans.
inline std::string strip_code(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 3, "```") == 0) {
      const auto close = s.find("```", i + 3);
      i = close == std::string_view::npos ? s.size() : close + 3;
      out.push_back(' ');
      continue;
    }
    if (s[i] == '`') {
      const auto close = s.find_first_of("`\n", i + 1);
      if (close != std::string_view::npos && s[close] == '`') {
        i = close + 1;
        out.push_back(' ');
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '.' || c == '-';
}

// scheme://... and www.... up to the next whitespace
inline std::string strip_urls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t url_start = std::string_view::npos;
    if (s.compare(i, 3, "://") == 0) {
      std::size_t b = out.size();
      while (b > 0 && is_scheme_char(out[b - 1])) --b;
      while (b < out.size() && !std::isalpha(static_cast<unsigned char>(out[b]))) ++b;
      if (b < out.size()) {
        out.resize(b);
        url_start = i;
      }
    } else if ((i == 0 || !is_scheme_char(s[i - 1])) && s.size() - i >= 4 &&
               text::iequals(s.substr(i, 4), "www.")) {
      url_start = i;
    }
    if (url_start != std::string_view::npos) {
      while (i < s.size() && !text::is_space(s[i])) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline char32_t fold_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  return c;
}

// ASCII letters plus the Latin-1 / Latin Extended-A/B letter ranges.
inline bool is_word_letter(char32_t c) {
  if (c >= U'a' && c <= U'z') return true;
  if (c >= 0xDF && c <= 0xFF) return c != 0xF7;
  return c >= 0x100 && c <= 0x24F;
}

inline std::string stem_token(const std::string& tok, CorpusLanguage lang) {
  return lang == CorpusLanguage::en ? porter_stem(tok) : portuguese_stem(tok);
}

}  // namespace detail

/// Lowercase, drop code spans, URLs, digits and punctuation, remove
/// stopwords, stem. Stemming is repeated until the token stops changing and
/// stopwords are checked before and after it, so the function is idempotent.
inline std::string clean_text(std::string_view raw, CorpusLanguage lang, const StopwordSet& stop) {
  const std::string s = detail::strip_urls(detail::strip_code(raw));

  std::u32string u = text::utf8_decode(s);
  for (auto& c : u) {
    c = detail::fold_lower(c);
    if (!detail::is_word_letter(c)) c = U' ';
  }
  const std::string letters = text::utf8_encode(u);

  std::string out;
  for (const auto& tok : text::split_whitespace(letters)) {
    if (stop.contains(tok)) continue;
    std::string cur = tok;
    for (int i = 0; i < 16; ++i) {
      auto next = detail::stem_token(cur, lang);
      if (next == cur) break;
      cur = std::move(next);
    }
    if (cur.empty() || stop.contains(cur)) continue;
    if (!out.empty()) out.push_back(' ');
    out += cur;
  }
  return out;
}

inline std::string clean_text(std::string_view raw, CorpusLanguage lang) {
  return clean_text(raw, lang, default_stopwords(lang));
}

/// Delete lines equal (trimmed, case-insensitive) to any template line.
inline std::string remove_templates(std::string_view body, const std::vector<std::string>& templates) {
  if (templates.empty()) return std::string(body);
  std::vector<std::string> norm;
  for (const auto& t : templates) {
    auto v = text::to_lower_ascii(text::trim(t));
    if (!v.empty()) norm.push_back(std::move(v));
  }
  std::string out;
  bool first = true;
  for (const auto& line : text::split(body, '\n')) {
    auto key = text::to_lower_ascii(text::trim(line));
    bool hit = false;
    for (const auto& t : norm)
      if (key == t) { hit = true; break; }
    if (hit) continue;
    if (!first) out.push_back('\n');
    out += line;
    first = false;
  }
  return out;
}

}  // namespace apidomain
