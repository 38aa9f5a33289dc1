#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace culturescope {

using Json = nlohmann::json;

// Serialization used for every persisted artifact: compact, keys sorted
// (nlohmann's object type is ordered by key), UTF-8 passthrough.
std::string dump_line(const Json& j);

std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);
void append_jsonl(const std::filesystem::path& path, const Json& row);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

template <typename T>
std::vector<T> read_records(const std::filesystem::path& path) {
  std::vector<T> out;
  for (const auto& row : read_jsonl(path)) out.push_back(row.get<T>());
  return out;
}

template <typename T>
void write_records(const std::filesystem::path& path, const std::vector<T>& records) {
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.emplace_back(r);
  write_jsonl(path, rows);
}

}  // namespace culturescope
