#pragma once

#include <filesystem>
#include <string>

#include "greid/harness/evaluation.hpp"
#include "greid/matcher.hpp"

namespace greid::harness {

enum class ReportFormat { csv, structured };

// CSV: header `rank,split,rate`, one row per split and rank, then rows with split `mean`.
// Timing is left out so identical evaluations give identical bytes.
std::string report_csv(const CmcReport& report);
// JSON with ranks, per-split rates, means, pair count and timing.
std::string report_json(const CmcReport& report);
CmcReport parse_report_json(const std::string& text);

/// Format from the extension: .csv gives csv, anything else structured.
ReportFormat format_for_report(const std::filesystem::path& path);
void emit_report(const CmcReport& report, const std::filesystem::path& path, ReportFormat format);
CmcReport load_report(const std::filesystem::path& path);

/// Match result as JSON: mapping pairs, objective, fused score and per-order terms.
std::string match_result_json(const MatchResult& result, const std::string& probe_id, const std::string& gallery_id);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace greid::harness
