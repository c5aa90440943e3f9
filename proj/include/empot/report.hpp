#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "empot/harness.hpp"

namespace empot {

enum class ReportFormat { csv, json, svg };

ReportFormat parse_report_format(const std::string& name);
std::string to_string(ReportFormat format);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool connect = false;
};

/// Tabular result plus a few scalar summaries and an optional plot on
/// already transformed axes. Rendering is a pure function of this struct.
struct Report {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::pair<std::string, double>> summary;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// y = first + second * x, drawn across the plotted x range.
  std::optional<std::pair<double, double>> fit_line;
  /// Outcome of the experiment's own acceptance check.
  bool passed = true;
};

Report make_report(const RateFit& fit);
Report make_report(const LowerBoundReport& report);
Report make_report(const ConcentrationReport& report);

/// Deterministic text for the format. CSV holds the table (header always
/// present), JSON the table plus labels and summary, SVG a scatter plot with
/// the fit line.
std::string render_report(const Report& report, ReportFormat format);

/// Writes <dir>/<stem>.<ext> for every format and returns the paths.
std::vector<std::string> emit_report(const Report& report, const std::string& dir,
                                     const std::string& stem,
                                     const std::vector<ReportFormat>& formats);

}  // namespace empot
