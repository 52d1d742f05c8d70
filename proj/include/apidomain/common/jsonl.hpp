#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"

namespace apidomain {

using json = nlohmann::json;

/// Newline-delimited JSON: one record per line, blank lines ignored.
template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line).get<T>());
    } catch (const json::exception& e) {
      throw DecodeError(path.string() + ": " + e.what(), lineno);
    }
  }
  return out;
}

template <typename T>
std::string to_jsonl(const std::vector<T>& records) {
  std::string out;
  for (const auto& r : records) {
    out += json(r).dump();
    out += '\n';
  }
  return out;
}

template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& records) {
  text::write_file(path, to_jsonl(records));
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(text::read_file(path));
  } catch (const json::parse_error& e) {
    throw DecodeError(path.string() + ": " + e.what(), 0);
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  text::write_file(path, j.dump(2) + "\n");
}

}  // namespace apidomain
