#include "support.hpp"

#include <atomic>
#include <random>

#include "culturescope/jsonl.hpp"

namespace cstest {

using namespace culturescope;

fs::path data_dir() { return CULTURESCOPE_DATA_DIR; }
fs::path test_data_dir() { return CULTURESCOPE_TEST_DATA_DIR; }
fs::path schema_path() { return data_dir() / "schema" / "culturescope_schema.json"; }
fs::path fixture_config() { return data_dir() / "fixtures" / "config.json"; }

const Schema& canonical_schema() {
  static const Schema schema = load_schema(schema_path());
  return schema;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

KnowledgeInstance make_instance(const std::string& dimension_id, const std::string& statement, const std::string& url,
                                QcStatus status) {
  KnowledgeInstance k;
  k.culture = "Spanish";
  k.language = "en";
  k.dimension_id = dimension_id;
  k.statement = statement;
  k.source_url = url;
  k.source_quote = statement;
  k.source_category = SourceCategory::kEncyclopedia;
  k.qc_status = status;
  if (status != QcStatus::kPending) k.qc_reason = status == QcStatus::kVerified ? "ENTAILED" : "NOT_ENTAILED";
  k.kb_id = make_kb_id(k.culture, k.language, dimension_id, statement);
  return k;
}

QuestionItem make_item(const std::string& id, const std::string& dimension_id, ContentType type, FormatType format,
                       std::vector<std::string> knowledge_ids) {
  QuestionItem q;
  q.item_id = id;
  q.culture = "Spanish";
  q.language = "en";
  q.content_type = type;
  q.format = format;
  q.question_text = "Question " + id;
  q.dimension_id = dimension_id;
  q.knowledge_ids = std::move(knowledge_ids);
  q.qc_status = QcStatus::kVerified;
  if (format == FormatType::kMultipleChoice) {
    q.options = {{"A", "first"}, {"B", "second"}, {"C", "third"}, {"D", "fourth"}};
    q.reference_answer = "B";
  } else if (format == FormatType::kTrueFalse) {
    q.reference_answer = "true";
  } else {
    q.reference_answer = "reference";
  }
  return q;
}

MainTableFixture load_main_table_fixture() {
  const fs::path dir = test_data_dir() / "main_table";
  MainTableFixture f;
  f.items = read_records<QuestionItem>(dir / "items.jsonl");
  f.records = read_records<EvalRecord>(dir / "records.jsonl");
  const Json expected = read_json_file(dir / "expected.json");
  f.model = expected.at("model").get<std::string>();
  f.language = expected.at("language").get<std::string>();
  f.expected_cells = expected.at("cells").get<std::vector<std::string>>();
  return f;
}

}  // namespace cstest
