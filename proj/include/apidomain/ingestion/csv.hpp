#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/ingestion/types.hpp"

namespace apidomain {

// RFC-4180 reading/writing ---------------------------------------------------

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// Parses delimited text with RFC-4180 quoting. A leading UTF-8 BOM is
/// ignored; invalid UTF-8 raises DecodeError naming the line.
inline std::vector<CsvRecord> parse_csv(std::string_view content, char delimiter = ',') {
  content = text::strip_bom(content);
  if (auto bad = text::find_invalid_utf8(content); bad != std::string_view::npos) {
    const auto line = 1 + static_cast<std::size_t>(
                              std::count(content.begin(), content.begin() + bad, '\n'));
    throw DecodeError("invalid UTF-8 in CSV input", line);
  }
  std::vector<CsvRecord> records;
  CsvRecord current{1, {}};
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(current.fields.size() == 1 && current.fields[0].empty())) records.push_back(current);
    current = CsvRecord{line, {}};
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw DecodeError("unterminated quoted field", current.line);
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

inline std::string csv_escape(std::string_view field, char delimiter = ',') {
  const bool needs_quotes =
      field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos ||
      (!field.empty() && (text::is_space(field.front()) || text::is_space(field.back())));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_line(const std::vector<std::string>& fields, char delimiter = ',') {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += delimiter;
    out += csv_escape(fields[i], delimiter);
  }
  out += '\n';
  return out;
}

// Import schema --------------------------------------------------------------

/// Column mapping for tracker exports, read from `key = column` lines.
///
/// Required keys: issue.key, issue.title, issue.body, link.
/// Optional keys: issue.comments, issue.state, issue.closed_at, issue.labels,
/// change.title, change.body, change.files, change.messages, change.merged,
/// link.source (csv_key | revision_field), delimiter, list.separator.
struct CsvSchema {
  std::map<std::string, std::string> columns;
  char delimiter = ',';
  char list_separator = ';';
  LinkSource link_source = LinkSource::csv_key;

  static constexpr std::string_view required_keys[] = {"issue.key", "issue.title", "issue.body",
                                                       "link"};

  [[nodiscard]] std::optional<std::string> column(const std::string& key) const {
    auto it = columns.find(key);
    if (it == columns.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  static CsvSchema parse(std::string_view content) {
    CsvSchema s;
    std::size_t lineno = 0;
    for (const auto& raw : text::split(content, '\n')) {
      ++lineno;
      auto line = text::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw SchemaError("schema line " + std::to_string(lineno) + ": expected key=column");
      const std::string key(text::trim(line.substr(0, eq)));
      const std::string value(text::trim(line.substr(eq + 1)));
      if (key == "delimiter") {
        s.delimiter = value == "\\t" || value == "tab" ? '\t' : (value.empty() ? ',' : value[0]);
      } else if (key == "list.separator") {
        s.list_separator = value.empty() ? ';' : value[0];
      } else if (key == "link.source") {
        if (value == "csv_key") s.link_source = LinkSource::csv_key;
        else if (value == "revision_field") s.link_source = LinkSource::revision_field;
        else throw SchemaError("unknown link.source '" + value + "'");
      } else {
        s.columns[key] = value;
      }
    }
    return s;
  }

  static CsvSchema load(const std::filesystem::path& path) {
    return parse(text::read_file(path));
  }

  /// The schema written by export_csv.
  static CsvSchema canonical() {
    CsvSchema s;
    s.columns = {{"issue.key", "key"},
                 {"issue.title", "title"},
                 {"issue.body", "body"},
                 {"issue.comments", "comments"},
                 {"issue.state", "state"},
                 {"issue.closed_at", "closed_at"},
                 {"issue.labels", "labels"},
                 {"link", "change_ref"},
                 {"change.title", "change_title"},
                 {"change.body", "change_body"},
                 {"change.files", "change_files"},
                 {"change.messages", "change_messages"},
                 {"change.merged", "change_merged"}};
    return s;
  }
};

struct CsvReject {
  std::size_t line = 0;
  std::string kind;  // "unlinked" | "malformed"
  std::string detail;

  friend bool operator==(const CsvReject&, const CsvReject&) = default;
};

inline void to_json(json& j, const CsvReject& r) {
  j = json{{"line", r.line}, {"kind", r.kind}, {"detail", r.detail}};
}
inline void from_json(const json& j, CsvReject& r) {
  j.at("line").get_to(r.line);
  j.at("kind").get_to(r.kind);
  r.detail = j.value("detail", "");
}

struct CsvImport {
  std::vector<Issue> issues;
  std::vector<ChangeSet> changes;
  std::vector<IssueChangeLink> links;
  std::vector<CsvReject> rejects;
};

namespace detail {

/// Trailing digit run of an identifier ("CRON-42" -> 42), if any.
inline std::optional<std::int64_t> trailing_number(std::string_view id) {
  std::size_t end = id.size();
  std::size_t start = end;
  while (start > 0 && std::isdigit(static_cast<unsigned char>(id[start - 1]))) --start;
  if (start == end || end - start > 18) return std::nullopt;
  const auto n = std::stoll(std::string(id.substr(start)));
  if (n <= 0) return std::nullopt;
  return n;
}

/// Stable id -> positive number assignment; collisions and digitless ids
/// receive fresh numbers above every numeric id seen.
class NumberAssigner {
 public:
  std::int64_t assign(const std::string& id) {
    if (auto it = by_id_.find(id); it != by_id_.end()) return it->second;
    auto n = trailing_number(id);
    std::int64_t chosen;
    if (n && !used_.count(*n)) {
      chosen = *n;
    } else {
      chosen = next_free();
    }
    used_.insert(chosen);
    by_id_[id] = chosen;
    return chosen;
  }

 private:
  std::int64_t next_free() {
    std::int64_t c = used_.empty() ? 1 : *used_.rbegin() + 1;
    while (used_.count(c)) ++c;
    return c;
  }
  std::map<std::string, std::int64_t> by_id_;
  std::set<std::int64_t> used_;
};

inline std::vector<std::string> parse_list_cell(const std::string& cell, char sep) {
  const auto t = text::trim(cell);
  if (t.empty()) return {};
  if (t.front() == '[') {
    try {
      auto j = json::parse(t);
      if (j.is_array()) return j.get<std::vector<std::string>>();
    } catch (const json::exception&) {
      // not JSON; fall through to separator split
    }
  }
  return text::split_list(t, sep);
}

inline bool parse_bool_cell(std::string_view v, bool fallback) {
  const auto t = text::to_lower_ascii(text::trim(v));
  if (t.empty()) return fallback;
  return t == "1" || t == "true" || t == "yes" || t == "y" || t == "merged";
}

}  // namespace detail

/// Loads issues, changes and their links from one delimited export. Rows
/// with an empty linkage cell yield an issue and an "unlinked" reject;
/// rows that cannot be interpreted become "malformed" rejects.
inline CsvImport import_csv_text(std::string_view content, const CsvSchema& schema,
                                 const std::string& project_id) {
  const auto records = parse_csv(content, schema.delimiter);
  if (records.empty()) throw SchemaError("CSV input has no header row");
  const auto& header = records.front().fields;
  std::map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < header.size(); ++i) col_index[std::string(text::trim(header[i]))] = i;

  for (auto key : CsvSchema::required_keys) {
    auto col = schema.column(std::string(key));
    if (!col) throw SchemaError("schema does not map required key '" + std::string(key) + "'");
    if (!col_index.count(*col))
      throw SchemaError("missing mandatory column '" + *col + "' (for " + std::string(key) + ")");
  }
  auto index_of = [&](const std::string& key) -> std::optional<std::size_t> {
    auto col = schema.column(key);
    if (!col) return std::nullopt;
    auto it = col_index.find(*col);
    if (it == col_index.end())
      throw SchemaError("missing column '" + *col + "' (for " + key + ")");
    return it->second;
  };
  const auto key_i = *index_of("issue.key");
  const auto title_i = *index_of("issue.title");
  const auto body_i = *index_of("issue.body");
  const auto link_i = *index_of("link");
  const auto comments_i = index_of("issue.comments");
  const auto state_i = index_of("issue.state");
  const auto closed_i = index_of("issue.closed_at");
  const auto labels_i = index_of("issue.labels");
  const auto ctitle_i = index_of("change.title");
  const auto cbody_i = index_of("change.body");
  const auto cfiles_i = index_of("change.files");
  const auto cmsg_i = index_of("change.messages");
  const auto cmerged_i = index_of("change.merged");

  CsvImport out;
  detail::NumberAssigner issue_numbers, change_numbers;
  std::map<std::int64_t, std::size_t> issue_pos, change_pos;
  std::set<std::pair<std::int64_t, std::int64_t>> seen_links;

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      out.rejects.push_back({rec.line, "malformed",
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(rec.fields.size())});
      continue;
    }
    auto cell = [&](std::optional<std::size_t> i) -> std::string {
      return i ? rec.fields[*i] : std::string{};
    };
    const std::string key(text::trim(rec.fields[key_i]));
    if (key.empty()) {
      out.rejects.push_back({rec.line, "malformed", "empty issue key"});
      continue;
    }
    const auto number = issue_numbers.assign(key);
    if (!issue_pos.count(number)) {
      Issue issue;
      issue.project_id = project_id;
      issue.number = number;
      issue.key = key;
      issue.title = rec.fields[title_i];
      issue.body = rec.fields[body_i];
      issue.comments = detail::parse_list_cell(cell(comments_i), schema.list_separator);
      const auto state = text::to_lower_ascii(text::trim(cell(state_i)));
      issue.state = state == "open" ? IssueState::open : IssueState::closed;
      if (auto closed = std::string(text::trim(cell(closed_i))); !closed.empty())
        issue.closed_at = closed;
      issue.existing_labels = detail::parse_list_cell(cell(labels_i), schema.list_separator);
      issue_pos[number] = out.issues.size();
      out.issues.push_back(std::move(issue));
    }

    const std::string ref(text::trim(rec.fields[link_i]));
    if (ref.empty()) {
      out.rejects.push_back({rec.line, "unlinked", "issue " + key + " has no linkage value"});
      continue;
    }
    const auto change_number = change_numbers.assign(ref);
    auto [it, inserted] = change_pos.try_emplace(change_number, out.changes.size());
    if (inserted) {
      ChangeSet c;
      c.project_id = project_id;
      c.number = change_number;
      c.ref = ref;
      c.title = cell(ctitle_i);
      c.body = cell(cbody_i);
      c.merged = detail::parse_bool_cell(cell(cmerged_i), true);
      out.changes.push_back(std::move(c));
    }
    auto& change = out.changes[it->second];
    for (auto& f : detail::parse_list_cell(cell(cfiles_i), schema.list_separator))
      change.changed_file_paths.push_back(std::move(f));
    change.changed_file_paths = dedup_paths(change.changed_file_paths);
    for (auto& m : detail::parse_list_cell(cell(cmsg_i), schema.list_separator))
      if (std::find(change.commit_messages.begin(), change.commit_messages.end(), m) ==
          change.commit_messages.end())
        change.commit_messages.push_back(std::move(m));

    if (seen_links.emplace(number, change_number).second)
      out.links.push_back({project_id, number, change_number, schema.link_source});
  }
  return out;
}

inline CsvImport import_csv(const std::filesystem::path& path, const CsvSchema& schema,
                            const std::string& project_id) {
  return import_csv_text(text::read_file(path), schema, project_id);
}

/// Writes the dataset in the canonical schema: one row per link, plus one
/// row with an empty change_ref for every unlinked issue.
inline std::string export_csv(const std::vector<Issue>& issues,
                              const std::vector<ChangeSet>& changes,
                              const std::vector<IssueChangeLink>& links) {
  const std::vector<std::string> header = {
      "key",          "title",       "body",         "comments",        "state",
      "closed_at",    "labels",      "change_ref",   "change_title",    "change_body",
      "change_files", "change_messages", "change_merged"};
  std::string out = csv_line(header);
  std::map<std::int64_t, const ChangeSet*> by_number;
  for (const auto& c : changes) by_number[c.number] = &c;
  auto issue_cells = [](const Issue& i) {
    return std::vector<std::string>{i.key.empty() ? std::to_string(i.number) : i.key,
                                    i.title,
                                    i.body,
                                    json(i.comments).dump(),
                                    i.state == IssueState::open ? "open" : "closed",
                                    i.closed_at.value_or(""),
                                    json(i.existing_labels).dump()};
  };
  for (const auto& issue : issues) {
    bool any = false;
    for (const auto& l : links) {
      if (l.issue != issue.number) continue;
      auto it = by_number.find(l.change);
      if (it == by_number.end()) continue;
      const auto& c = *it->second;
      auto row = issue_cells(issue);
      row.insert(row.end(), {c.ref.empty() ? std::to_string(c.number) : c.ref, c.title, c.body,
                             json(c.changed_file_paths).dump(), json(c.commit_messages).dump(),
                             c.merged ? "true" : "false"});
      out += csv_line(row);
      any = true;
    }
    if (!any) {
      auto row = issue_cells(issue);
      row.insert(row.end(), {"", "", "", "", "", ""});
      out += csv_line(row);
    }
  }
  return out;
}

}  // namespace apidomain
