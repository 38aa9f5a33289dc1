#include "culturescope/types.hpp"

#include "culturescope/text.hpp"

namespace culturescope {

std::string_view to_string(SourceCategory c) {
  switch (c) {
    case SourceCategory::kEncyclopedia: return "ENCYCLOPEDIA";
    case SourceCategory::kGovernment: return "GOVERNMENT";
    case SourceCategory::kMedia: return "MEDIA";
    case SourceCategory::kTourismCulture: return "TOURISM_CULTURE";
    case SourceCategory::kEducation: return "EDUCATION";
    case SourceCategory::kForum: return "FORUM";
    case SourceCategory::kOther: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(QcStatus s) {
  switch (s) {
    case QcStatus::kPending: return "PENDING";
    case QcStatus::kVerified: return "VERIFIED";
    case QcStatus::kRejected: return "REJECTED";
  }
  return "PENDING";
}

std::string_view to_string(ContentType t) {
  switch (t) {
    case ContentType::kFactual: return "FACTUAL";
    case ContentType::kConceptual: return "CONCEPTUAL";
    case ContentType::kMisleading: return "MISLEADING";
    case ContentType::kMultiHop: return "MULTI_HOP";
  }
  return "FACTUAL";
}

std::string_view to_string(FormatType f) {
  switch (f) {
    case FormatType::kMultipleChoice: return "MULTIPLE_CHOICE";
    case FormatType::kTrueFalse: return "TRUE_FALSE";
    case FormatType::kShortAnswer: return "SHORT_ANSWER";
    case FormatType::kEssay: return "ESSAY";
  }
  return "MULTIPLE_CHOICE";
}

std::optional<SourceCategory> parse_source_category(std::string_view s) {
  for (auto c : kAllSourceCategories)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<QcStatus> parse_qc_status(std::string_view s) {
  for (auto q : {QcStatus::kPending, QcStatus::kVerified, QcStatus::kRejected})
    if (to_string(q) == s) return q;
  return std::nullopt;
}

std::optional<ContentType> parse_content_type(std::string_view s) {
  const std::string u = text::to_upper(s);
  if (u == "MISLEAD") return ContentType::kMisleading;
  if (u == "MULTI-HOP" || u == "MULTIHOP") return ContentType::kMultiHop;
  for (auto t : kAllContentTypes)
    if (to_string(t) == u) return t;
  return std::nullopt;
}

std::optional<FormatType> parse_format(std::string_view s) {
  const std::string u = text::to_upper(s);
  for (auto f : kAllFormats)
    if (to_string(f) == u) return f;
  return std::nullopt;
}

}  // namespace culturescope
