#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "culturescope/evaluation.hpp"
#include "culturescope/extraction.hpp"
#include "culturescope/question_gen.hpp"
#include "culturescope/schema.hpp"

namespace cstest {

namespace fs = std::filesystem;

fs::path data_dir();
fs::path test_data_dir();
fs::path schema_path();
fs::path fixture_config();
const culturescope::Schema& canonical_schema();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "cstest");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

culturescope::KnowledgeInstance make_instance(const std::string& dimension_id, const std::string& statement,
                                              const std::string& url = "https://example.org/page",
                                              culturescope::QcStatus status = culturescope::QcStatus::kVerified);

culturescope::QuestionItem make_item(const std::string& id, const std::string& dimension_id,
                                     culturescope::ContentType type, culturescope::FormatType format,
                                     std::vector<std::string> knowledge_ids = {"kb-1"});

struct MainTableFixture {
  std::vector<culturescope::QuestionItem> items;
  std::vector<culturescope::EvalRecord> records;
  std::string model;
  std::string language;
  std::vector<std::string> expected_cells;
};
MainTableFixture load_main_table_fixture();

}  // namespace cstest
