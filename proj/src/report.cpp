#include "rubricgrade/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "rubricgrade/errors.hpp"

namespace rubricgrade {

std::string to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::delimited: return "delimited";
    case ReportFormat::structured: return "structured";
    case ReportFormat::markdown: return "markdown";
  }
  throw ConfigError("unrepresentable report format");
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "delimited") return ReportFormat::delimited;
  if (s == "structured") return ReportFormat::structured;
  if (s == "markdown") return ReportFormat::markdown;
  throw ConfigError("unknown report format: " + s);
}

namespace {

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

// Shortest round-trip decimal, for machine-readable columns.
std::string exact(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

// "84.1 (0.9)" for accuracy, "0.864 (0.008)" for the rest.
std::string accuracy_cell(const MetricSummary& m) {
  return fixed(m.mean * 100.0, 1) + " (" + fixed(m.stdev * 100.0, 1) + ")";
}

std::string metric_cell(const MetricSummary& m) {
  return fixed(m.mean, 3) + " (" + fixed(m.stdev, 3) + ")";
}

std::string delta_cell(double delta) {
  const double scaled = delta * 100.0;
  return (scaled >= 0.0 ? "+" : "") + fixed(scaled, 1);
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(seeds[i]);
  }
  return out;
}

std::string provenance_lines(const ProtocolResult& result,
                             const std::string& prefix) {
  std::string out;
  out += prefix + "protocol: " + result.protocol + "\n";
  out += prefix + "corpus: " + result.corpus_hash + "\n";
  out += prefix + "seeds: " + join_seeds(result.seeds) + "\n";
  out += prefix + "config: " + result.config_echo.dump() + "\n";
  return out;
}

std::string render_markdown(const ProtocolResult& result) {
  std::string out = "# " + result.protocol + "\n\n";
  out += "- corpus: `" + result.corpus_hash + "`\n";
  out += "- seeds: " + join_seeds(result.seeds) + "\n";
  out += "- config: `" + result.config_echo.dump() + "`\n\n";
  out += "| condition | n | accuracy | precision | recall | F1 |\n";
  out += "| --- | --- | --- | --- | --- | --- |\n";
  for (const auto& row : result.rows) {
    out += "| " + row.key + " | " + std::to_string(row.summary.n_runs) +
           " | " + accuracy_cell(row.summary.accuracy) + " | " +
           metric_cell(row.summary.precision) + " | " +
           metric_cell(row.summary.recall) + " | " +
           metric_cell(row.summary.f1) + " |\n";
  }
  return out;
}

std::string render_structured(const ProtocolResult& result) {
  std::string out = provenance_lines(result, "");
  for (const auto& row : result.rows) {
    out += "\n[" + row.key + "]\n";
    out += "  n_runs: " + std::to_string(row.summary.n_runs) + "\n";
    out += "  accuracy: " + accuracy_cell(row.summary.accuracy) + "\n";
    out += "  precision: " + metric_cell(row.summary.precision) + "\n";
    out += "  recall: " + metric_cell(row.summary.recall) + "\n";
    out += "  f1: " + metric_cell(row.summary.f1) + "\n";
  }
  return out;
}

std::string render_delimited(const ProtocolResult& result) {
  std::string out = provenance_lines(result, "# ");
  out +=
      "key,n_runs,accuracy_mean,accuracy_std,precision_mean,precision_std,"
      "recall_mean,recall_std,f1_mean,f1_std\n";
  for (const auto& row : result.rows) {
    const RunSummary& s = row.summary;
    out += row.key + "," + std::to_string(s.n_runs) + "," +
           exact(s.accuracy.mean) + "," + exact(s.accuracy.stdev) + "," +
           exact(s.precision.mean) + "," + exact(s.precision.stdev) + "," +
           exact(s.recall.mean) + "," + exact(s.recall.stdev) + "," +
           exact(s.f1.mean) + "," + exact(s.f1.stdev) + "\n";
  }
  return out;
}

const char* larger_side(double rubric, double score) {
  if (rubric > score) return "rubric";
  if (score > rubric) return "score";
  return "tie";
}

// Bolds the larger of the two markdown cells in place.
void mark_larger(std::string& rubric_cell, std::string& score_cell,
                 double rubric, double score) {
  if (rubric > score) {
    rubric_cell = "**" + rubric_cell + "**";
  } else if (score > rubric) {
    score_cell = "**" + score_cell + "**";
  }
}

}  // namespace

std::string render_report(const ProtocolResult& result, ReportFormat format) {
  if (result.rows.empty()) {
    throw DataError("refusing to render a result with no rows");
  }
  switch (format) {
    case ReportFormat::markdown: return render_markdown(result);
    case ReportFormat::structured: return render_structured(result);
    case ReportFormat::delimited: return render_delimited(result);
  }
  throw ConfigError("unrepresentable report format");
}

std::string render_comparison(const ComparisonResult& result,
                              ReportFormat format) {
  if (result.rows.empty()) {
    throw DataError("refusing to render a comparison with no rows");
  }
  std::string out;
  switch (format) {
    case ReportFormat::markdown: {
      out += "# formulation comparison\n\n";
      out += "- corpus: `" + result.corpus_hash + "`\n";
      out += "- seeds: " + join_seeds(result.seeds) + "\n\n";
      out +=
          "| rubric condition | score condition | rubric accuracy | "
          "score accuracy | Δ accuracy | rubric F1 | score F1 | Δ F1 |\n";
      out += "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
      for (const auto& row : result.rows) {
        std::string rubric_acc = accuracy_cell(row.rubric.accuracy);
        std::string score_acc = accuracy_cell(row.score.accuracy);
        mark_larger(rubric_acc, score_acc, row.rubric.accuracy.mean,
                    row.score.accuracy.mean);
        std::string rubric_f1 = metric_cell(row.rubric.f1);
        std::string score_f1 = metric_cell(row.score.f1);
        mark_larger(rubric_f1, score_f1, row.rubric.f1.mean,
                    row.score.f1.mean);
        out += "| " + row.rubric_key + " | " + row.score_key + " | " +
               rubric_acc + " | " + score_acc + " | " +
               delta_cell(row.accuracy_delta) + " | " + rubric_f1 + " | " +
               score_f1 + " | " + delta_cell(row.f1_delta) + " |\n";
      }
      return out;
    }
    case ReportFormat::structured: {
      out += "protocol: formulation-comparison\n";
      out += "corpus: " + result.corpus_hash + "\n";
      out += "seeds: " + join_seeds(result.seeds) + "\n";
      for (const auto& row : result.rows) {
        out += "\n[" + row.rubric_key + " vs " + row.score_key + "]\n";
        out += "  rubric accuracy: " + accuracy_cell(row.rubric.accuracy) +
               "\n";
        out += "  score accuracy: " + accuracy_cell(row.score.accuracy) +
               "\n";
        out += "  accuracy delta: " + delta_cell(row.accuracy_delta) +
               " (larger: " +
               larger_side(row.rubric.accuracy.mean, row.score.accuracy.mean) +
               ")\n";
        out += "  rubric f1: " + metric_cell(row.rubric.f1) + "\n";
        out += "  score f1: " + metric_cell(row.score.f1) + "\n";
        out += "  f1 delta: " + delta_cell(row.f1_delta) + " (larger: " +
               larger_side(row.rubric.f1.mean, row.score.f1.mean) + ")\n";
      }
      return out;
    }
    case ReportFormat::delimited: {
      out += "# protocol: formulation-comparison\n";
      out += "# corpus: " + result.corpus_hash + "\n";
      out += "# seeds: " + join_seeds(result.seeds) + "\n";
      out +=
          "rubric_key,score_key,rubric_accuracy,score_accuracy,"
          "accuracy_delta,accuracy_larger,rubric_f1,score_f1,f1_delta,"
          "f1_larger\n";
      for (const auto& row : result.rows) {
        out += row.rubric_key + "," + row.score_key + "," +
               exact(row.rubric.accuracy.mean) + "," +
               exact(row.score.accuracy.mean) + "," +
               exact(row.accuracy_delta) + "," +
               larger_side(row.rubric.accuracy.mean,
                           row.score.accuracy.mean) +
               "," + exact(row.rubric.f1.mean) + "," +
               exact(row.score.f1.mean) + "," + exact(row.f1_delta) + "," +
               larger_side(row.rubric.f1.mean, row.score.f1.mean) + "\n";
      }
      return out;
    }
  }
  throw ConfigError("unrepresentable report format");
}

std::string render_curve(const ProtocolResult& result) {
  if (result.curve.empty()) {
    throw DataError("result carries no curve data");
  }
  std::string out = "fraction,metric,mean,std\n";
  for (const auto& point : result.curve) {
    out += exact(point.fraction.to_double()) + "," + point.metric + "," +
           exact(point.mean) + "," + exact(point.stdev) + "\n";
  }
  return out;
}

namespace {

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed while writing " + path.string());
}

}  // namespace

void emit_report(const ProtocolResult& result, ReportFormat format,
                 const std::filesystem::path& path) {
  write_text(render_report(result, format), path);
}

void emit_comparison(const ComparisonResult& result, ReportFormat format,
                     const std::filesystem::path& path) {
  write_text(render_comparison(result, format), path);
}

}  // namespace rubricgrade
