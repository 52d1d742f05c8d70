#pragma once

#include <cctype>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/corpus/clean.hpp"
#include "apidomain/ingestion/types.hpp"

namespace apidomain {

enum class CorpusFields { title, body, title_body, title_body_comments };

inline std::string to_string(CorpusFields f) {
  switch (f) {
    case CorpusFields::title: return "T";
    case CorpusFields::body: return "B";
    case CorpusFields::title_body: return "T+B";
    case CorpusFields::title_body_comments: return "T+B+C";
  }
  return "?";
}

inline CorpusFields parse_corpus_fields(std::string_view s) {
  std::string v;
  for (char c : s)
    if (!text::is_space(c)) v.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (v == "T" || v == "TITLE") return CorpusFields::title;
  if (v == "B" || v == "BODY") return CorpusFields::body;
  if (v == "T+B" || v == "TB") return CorpusFields::title_body;
  if (v == "T+B+C" || v == "TBC") return CorpusFields::title_body_comments;
  throw ConfigError("unknown corpus fields '" + std::string(s) + "' (expected T, B, T+B or T+B+C)");
}

inline std::string compose_row_id(std::string_view project, std::int64_t number) {
  return std::string(project) + "/" + std::to_string(number);
}

struct Document {
  std::string row_id;
  std::string project_id;
  std::int64_t number = 0;
  CorpusFields fields = CorpusFields::body;
  CorpusLanguage language = CorpusLanguage::en;
  std::string text;  // cleaned
};

inline void to_json(nlohmann::json& j, const Document& d) {
  j = {{"row_id", d.row_id}, {"project", d.project_id}, {"number", d.number},
       {"fields", to_string(d.fields)}, {"language", to_string(d.language)}, {"text", d.text}};
}
inline void from_json(const nlohmann::json& j, Document& d) {
  d.row_id = j.at("row_id").get<std::string>();
  d.project_id = j.at("project").get<std::string>();
  d.number = j.at("number").get<std::int64_t>();
  d.fields = parse_corpus_fields(j.at("fields").get<std::string>());
  d.language = parse_corpus_language(j.at("language").get<std::string>());
  d.text = j.at("text").get<std::string>();
}

struct CorpusOptions {
  CorpusFields fields = CorpusFields::body;
  CorpusLanguage language = CorpusLanguage::en;
  std::vector<std::string> templates;
  const StopwordSet* stopwords = nullptr;  // null: built-in list for the language
};

/// Raw concatenation of the selected fields; identical segments appear once.
inline std::string select_fields(const Issue& issue, CorpusFields fields,
                                 const std::vector<std::string>& templates = {}) {
  std::vector<std::string> segs;
  const bool t = fields != CorpusFields::body;
  const bool b = fields != CorpusFields::title;
  if (t) segs.push_back(issue.title);
  if (b) segs.push_back(remove_templates(issue.body, templates));
  if (fields == CorpusFields::title_body_comments)
    for (const auto& c : issue.comments) segs.push_back(remove_templates(c, templates));

  std::set<std::string> seen;
  std::string out;
  for (const auto& s : segs) {
    const std::string key(text::trim(s));
    if (key.empty() || !seen.insert(key).second) continue;
    if (!out.empty()) out += "\n";
    out += s;
  }
  return out;
}

inline Document make_document(const Issue& issue, const CorpusOptions& opt) {
  Document d;
  d.row_id = compose_row_id(issue.project_id, issue.number);
  d.project_id = issue.project_id;
  d.number = issue.number;
  d.fields = opt.fields;
  d.language = opt.language;
  const auto raw = select_fields(issue, opt.fields, opt.templates);
  d.text = opt.stopwords ? clean_text(raw, opt.language, *opt.stopwords) : clean_text(raw, opt.language);
  return d;
}

}  // namespace apidomain
