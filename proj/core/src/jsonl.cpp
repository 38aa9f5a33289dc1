#include "culturescope/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "culturescope/error.hpp"

namespace culturescope {

namespace fs = std::filesystem;

std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const fs::path& path, const std::vector<Json>& rows) {
  std::string content;
  for (const auto& row : rows) {
    content += dump_line(row);
    content.push_back('\n');
  }
  write_text_file(path, content);
}

void append_jsonl(const fs::path& path, const Json& row) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path.string());
  out << dump_line(row) << '\n';
}

Json read_json_file(const fs::path& path) {
  const std::string content = read_text_file(path);
  try {
    return Json::parse(content);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line number for the message.
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < content.size(); ++i)
      if (content[i] == '\n') ++line;
    throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename into " + path.string() + ": " + ec.message());
}

}  // namespace culturescope
