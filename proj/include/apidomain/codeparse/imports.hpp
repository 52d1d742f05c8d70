#pragma once

#include <algorithm>
#include <cctype>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"

namespace apidomain {

enum class Language { java, csharp, cpp };

NLOHMANN_JSON_SERIALIZE_ENUM(Language, {{Language::java, "java"},
                                        {Language::csharp, "csharp"},
                                        {Language::cpp, "cpp"}})

inline std::string_view to_string(Language l) {
  switch (l) {
    case Language::java: return "java";
    case Language::csharp: return "csharp";
    case Language::cpp: return "cpp";
  }
  return "?";
}

inline Language parse_language(std::string_view name) {
  const auto n = text::to_lower_ascii(text::trim(name));
  if (n == "java") return Language::java;
  if (n == "csharp" || n == "cs" || n == "c#") return Language::csharp;
  if (n == "cpp" || n == "c++" || n == "cxx") return Language::cpp;
  throw UnsupportedLanguageError("unsupported source language '" + std::string(name) + "'");
}

inline std::vector<std::string> language_extensions(Language l) {
  switch (l) {
    case Language::java: return {".java"};
    case Language::csharp: return {".cs"};
    case Language::cpp: return {".cpp", ".cc", ".cxx", ".h", ".hpp", ".hh", ".hxx"};
  }
  return {};
}

/// An imported namespace as written in one source file.
struct ApiReference {
  std::string ns;
  std::string source_file;
  Language language = Language::java;

  friend bool operator==(const ApiReference&, const ApiReference&) = default;
};

namespace detail {

/// Blanks comments and string/char literal contents in one pass, keeping
/// line structure. Quoted text on C/C++ preprocessor lines is left intact
/// so `#include "x"` survives.
inline std::string mask_non_code(std::string_view src, Language lang) {
  enum class State { code, line_comment, block_comment, string, chr, verbatim, raw, text_block };
  std::string out(src);
  State state = State::code;
  bool line_start = true;
  bool directive = false;
  std::string raw_delim;
  auto blank = [&](std::size_t i) {
    if (out[i] != '\n') out[i] = ' ';
  };
  auto mask = [&](std::size_t i) {
    if (out[i] != '\n') out[i] = 'x';
  };
  for (std::size_t i = 0; i < src.size(); ++i) {
    const char c = src[i];
    const char next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (state) {
      case State::code:
        if (c == '\n') {
          line_start = true;
          directive = false;
          break;
        }
        if (directive && c == '"') {
          const auto close = src.find_first_of("\"\n", i + 1);
          if (close != std::string_view::npos && src[close] == '"') i = close;
          break;
        }
        if (c == '/' && next == '/') {
          state = State::line_comment;
          blank(i);
          break;
        }
        if (c == '/' && next == '*') {
          state = State::block_comment;
          blank(i);
          blank(++i);
          break;
        }
        if (line_start && !text::is_space(c)) {
          line_start = false;
          directive = c == '#' && lang == Language::cpp;
        }
        if (directive) break;
        if (c == '"') {
          if (lang == Language::java && next == '"' && i + 2 < src.size() && src[i + 2] == '"') {
            state = State::text_block;
            i += 2;
          } else if (lang == Language::csharp && i > 0 && src[i - 1] == '@') {
            state = State::verbatim;
          } else if (lang == Language::cpp && i > 0 && src[i - 1] == 'R') {
            const auto open = src.find('(', i + 1);
            if (open != std::string_view::npos && open - i <= 17) {
              raw_delim = ")" + std::string(src.substr(i + 1, open - i - 1)) + "\"";
              state = State::raw;
              for (std::size_t k = i + 1; k <= open; ++k) mask(k);
              i = open;
            } else {
              state = State::string;
            }
          } else {
            state = State::string;
          }
        } else if (c == '\'' &&
                   !(i > 0 && std::isalnum(static_cast<unsigned char>(src[i - 1])))) {
          state = State::chr;
        }
        break;
      case State::line_comment:
        if (c == '\n') {
          state = State::code;
          line_start = true;
          directive = false;
        } else {
          blank(i);
        }
        break;
      case State::block_comment:
        if (c == '*' && next == '/') {
          blank(i);
          blank(++i);
          state = State::code;
        } else {
          blank(i);
        }
        break;
      case State::string:
      case State::chr: {
        const char close = state == State::string ? '"' : '\'';
        if (c == '\\') {
          mask(i);
          if (i + 1 < src.size()) mask(++i);
        } else if (c == close) {
          state = State::code;
        } else if (c == '\n') {  // unterminated literal: recover at line end
          state = State::code;
          line_start = true;
          directive = false;
        } else {
          mask(i);
        }
        break;
      }
      case State::verbatim:
        if (c == '"' && next == '"') {
          mask(i);
          mask(++i);
        } else if (c == '"') {
          state = State::code;
        } else {
          mask(i);
        }
        break;
      case State::raw:
        if (src.substr(i, raw_delim.size()) == raw_delim) {
          for (std::size_t k = 0; k + 1 < raw_delim.size(); ++k) mask(i + k);
          i += raw_delim.size() - 1;
          state = State::code;
        } else {
          mask(i);
        }
        break;
      case State::text_block:
        if (c == '\\') {
          mask(i);
          if (i + 1 < src.size()) mask(++i);
        } else if (c == '"' && next == '"' && i + 2 < src.size() && src[i + 2] == '"') {
          i += 2;
          state = State::code;
        } else {
          mask(i);
        }
        break;
    }
  }
  return out;
}

inline std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!text::is_space(c)) out.push_back(c);
  return out;
}

inline void add_unique(std::vector<std::string>& out, std::string ns) {
  while (!ns.empty() && (ns.back() == '.' || ns.back() == ';')) ns.pop_back();
  if (ns.empty()) return;
  if (std::find(out.begin(), out.end(), ns) == out.end()) out.push_back(std::move(ns));
}

}  // namespace detail

/// Imported namespaces of one source file, first occurrence order.
///
/// Java: `import` and `import static` (member kept), wildcard suffix `.*`
/// stripped. C#: `using` directives; for `using A = B;` the target B is
/// recorded; `using (...)` blocks and `using var` declarations are not
/// directives. C++: `#include <x>` and `#include "x"`.
inline std::vector<std::string> parse_import_namespaces(std::string_view content, Language lang) {
  static const std::regex java_import(
      R"((?:^|[^\w.$])import\s+(?:static\s+)?([A-Za-z_$][\w$]*(?:\s*\.\s*(?:[A-Za-z_$][\w$]*|\*))*)\s*;)");
  static const std::regex cs_using(
      R"((?:^|[^\w.])using\s+(?:static\s+)?([A-Za-z_@][\w]*(?:\s*\.\s*[A-Za-z_@][\w]*)*)\s*;)");
  static const std::regex cs_alias(
      R"((?:^|[^\w.])using\s+[A-Za-z_@][\w]*\s*=\s*([A-Za-z_@][\w]*(?:\s*(?:\.|::)\s*[A-Za-z_@][\w]*)*)\s*(?:<[^;]*>)?\s*;)");
  static const std::regex cpp_include(R"(^[ \t]*#[ \t]*include[ \t]*([<"])([^>"\n]+)[>"])");

  const auto masked = detail::mask_non_code(content, lang);
  std::vector<std::string> out;
  auto scan = [&](const std::regex& re, int group) {
    for (std::sregex_iterator it(masked.begin(), masked.end(), re), end; it != end; ++it) {
      std::string ns = detail::strip_spaces((*it)[group].str());
      if (lang == Language::java && ns.size() >= 2 && ns.ends_with(".*")) ns.resize(ns.size() - 2);
      detail::add_unique(out, std::move(ns));
    }
  };
  switch (lang) {
    case Language::java:
      scan(java_import, 1);
      break;
    case Language::csharp: {
      // Keep statement order: collect both forms with their positions.
      std::vector<std::pair<std::ptrdiff_t, std::string>> hits;
      for (const auto* re : {&cs_using, &cs_alias})
        for (std::sregex_iterator it(masked.begin(), masked.end(), *re), end; it != end; ++it)
          hits.emplace_back(it->position(1), detail::strip_spaces((*it)[1].str()));
      std::sort(hits.begin(), hits.end());
      for (auto& [pos, ns] : hits) {
        auto dc = ns.find("::");  // global::System -> System
        if (dc != std::string::npos) ns = ns.substr(dc + 2);
        detail::add_unique(out, std::move(ns));
      }
      break;
    }
    case Language::cpp:
      for (std::size_t start = 0; start <= masked.size();) {
        auto nl = masked.find('\n', start);
        if (nl == std::string::npos) nl = masked.size();
        const std::string line = masked.substr(start, nl - start);
        std::smatch m;
        if (std::regex_search(line, m, cpp_include)) {
          const bool angle = m[1].str() == "<";
          const auto rest = line.substr(static_cast<std::size_t>(m.position(2) + m.length(2)));
          if (!rest.empty() && rest.front() == (angle ? '>' : '"'))
            detail::add_unique(out, std::string(text::trim(m[2].str())));
        }
        start = nl + 1;
      }
      break;
  }
  return out;
}

inline std::vector<ApiReference> parse_imports(std::string_view content, Language lang,
                                               const std::string& source_file = {}) {
  std::vector<ApiReference> out;
  for (auto& ns : parse_import_namespaces(content, lang)) out.push_back({std::move(ns), source_file, lang});
  return out;
}

inline std::vector<ApiReference> parse_imports(std::string_view content, std::string_view language,
                                               const std::string& source_file = {}) {
  return parse_imports(content, parse_language(language), source_file);
}

}  // namespace apidomain
