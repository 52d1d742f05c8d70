#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apidomain/ingestion/types.hpp"
#include "apidomain/common/text.hpp"

namespace apidomain {

/// Issue numbers referenced as `#<digits>` in `text`. The digits must be
/// followed by end of text or a non-alphanumeric character, so "PR#12abc"
/// does not match but "#1.2" yields 1.
inline std::vector<std::int64_t> find_issue_references(std::string_view text) {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i + 1) continue;
    if (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
      continue;
    const auto digits = text.substr(i + 1, j - i - 1);
    if (digits.size() > 18) continue;
    out.push_back(std::stoll(std::string(digits)));
    i = j - 1;
  }
  return out;
}

/// One reference_pattern link per distinct (change, issue) where the issue
/// number exists among `issues`. Output is sorted, so input order is irrelevant.
inline std::vector<IssueChangeLink> link_by_reference(const std::vector<Issue>& issues,
                                                      const std::vector<ChangeSet>& changes) {
  std::set<std::pair<std::string, std::int64_t>> known;
  for (const auto& i : issues) known.emplace(i.project_id, i.number);
  std::set<IssueChangeLink> links;
  for (const auto& c : changes) {
    for (const auto* field : {&c.title, &c.body}) {
      for (auto n : find_issue_references(*field)) {
        if (known.count({c.project_id, n}))
          links.insert({c.project_id, n, c.number, LinkSource::reference_pattern});
      }
    }
  }
  return {links.begin(), links.end()};
}

struct FilterReport {
  std::vector<IssueChangeLink> kept;
  std::size_t discarded = 0;
};

/// Default source extensions for the three supported project languages.
inline std::set<std::string> source_extensions_for(std::string_view language) {
  if (language == "java") return {".java"};
  if (language == "csharp") return {".cs"};
  if (language == "cpp") return {".cpp", ".h", ".hpp", ".cc", ".cxx", ".hh"};
  return {};
}

inline bool has_source_extension(std::string_view path, const std::set<std::string>& exts) {
  const auto ext = text::to_lower_ascii(std::filesystem::path(path).extension().string());
  return exts.count(ext) > 0;
}

/// Keeps links whose change touches at least one file with a listed
/// extension. Links whose change is not in `changes` are discarded too.
inline FilterReport filter_linked(const std::vector<IssueChangeLink>& links,
                                  const std::vector<ChangeSet>& changes,
                                  const std::set<std::string>& source_extensions) {
  std::map<std::pair<std::string, std::int64_t>, const ChangeSet*> by_number;
  for (const auto& c : changes) by_number[{c.project_id, c.number}] = &c;
  FilterReport report;
  for (const auto& l : links) {
    auto it = by_number.find({l.project_id, l.change});
    const bool touches_source =
        it != by_number.end() &&
        std::any_of(it->second->changed_file_paths.begin(), it->second->changed_file_paths.end(),
                    [&](const std::string& p) { return has_source_extension(p, source_extensions); });
    if (touches_source)
      report.kept.push_back(l);
    else
      ++report.discarded;
  }
  return report;
}

/// Drops links whose issue or change endpoint is missing.
inline std::vector<IssueChangeLink> resolve_links(const std::vector<IssueChangeLink>& links,
                                                  const std::vector<Issue>& issues,
                                                  const std::vector<ChangeSet>& changes) {
  std::set<std::pair<std::string, std::int64_t>> is, cs;
  for (const auto& i : issues) is.emplace(i.project_id, i.number);
  for (const auto& c : changes) cs.emplace(c.project_id, c.number);
  std::vector<IssueChangeLink> out;
  for (const auto& l : links)
    if (is.count({l.project_id, l.issue}) && cs.count({l.project_id, l.change})) out.push_back(l);
  return out;
}

}  // namespace apidomain
