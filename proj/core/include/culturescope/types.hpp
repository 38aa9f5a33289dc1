#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace culturescope {

enum class SourceCategory { kEncyclopedia, kGovernment, kMedia, kTourismCulture, kEducation, kForum, kOther };
inline constexpr std::array<SourceCategory, 7> kAllSourceCategories = {
    SourceCategory::kEncyclopedia, SourceCategory::kGovernment, SourceCategory::kMedia, SourceCategory::kTourismCulture,
    SourceCategory::kEducation,    SourceCategory::kForum,      SourceCategory::kOther};

enum class QcStatus { kPending, kVerified, kRejected };

enum class ContentType { kFactual, kConceptual, kMisleading, kMultiHop };
inline constexpr std::array<ContentType, 4> kAllContentTypes = {ContentType::kFactual, ContentType::kConceptual,
                                                                ContentType::kMisleading, ContentType::kMultiHop};

enum class FormatType { kMultipleChoice, kTrueFalse, kShortAnswer, kEssay };
inline constexpr std::array<FormatType, 4> kAllFormats = {FormatType::kMultipleChoice, FormatType::kTrueFalse,
                                                          FormatType::kShortAnswer, FormatType::kEssay};

inline bool is_objective(FormatType f) { return f == FormatType::kMultipleChoice || f == FormatType::kTrueFalse; }

std::string_view to_string(SourceCategory c);
std::string_view to_string(QcStatus s);
std::string_view to_string(ContentType t);
std::string_view to_string(FormatType f);

std::optional<SourceCategory> parse_source_category(std::string_view s);
std::optional<QcStatus> parse_qc_status(std::string_view s);
// Accepts "MISLEADING" and the legacy spelling "MISLEAD".
std::optional<ContentType> parse_content_type(std::string_view s);
std::optional<FormatType> parse_format(std::string_view s);

}  // namespace culturescope
