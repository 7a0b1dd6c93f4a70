#pragma once

// Report emission. Accuracy cells render scaled by 100 with one decimal,
// "84.1 (0.9)"; precision, recall and F1 render in [0,1] with three
// decimals, "0.864 (0.008)". Output bytes are a pure function of the
// result, so byte comparison doubles as a regression check.

#include <filesystem>
#include <string>

#include "rubricgrade/protocols.hpp"

namespace rubricgrade {

enum class ReportFormat { delimited, structured, markdown };

std::string to_string(ReportFormat format);
ReportFormat report_format_from_string(const std::string& s);

// Provenance header (corpus hash, seeds, config echo) followed by one row
// per condition. Results without rows are refused.
std::string render_report(const ProtocolResult& result, ReportFormat format);

// Side-by-side formulation table. Deltas are rubric minus score, scaled
// by 100 and signed ("+9.2"); each row marks which side is larger.
std::string render_comparison(const ComparisonResult& result,
                              ReportFormat format);

// Sweep trajectory as `fraction,metric,mean,std` lines.
std::string render_curve(const ProtocolResult& result);

void emit_report(const ProtocolResult& result, ReportFormat format,
                 const std::filesystem::path& path);
void emit_comparison(const ComparisonResult& result, ReportFormat format,
                     const std::filesystem::path& path);

}  // namespace rubricgrade
