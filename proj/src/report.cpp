#include "empot/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "empot/error.hpp"
#include "empot/io.hpp"

namespace empot {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_csv(const Report& r) {
  std::string out;
  for (std::size_t c = 0; c < r.columns.size(); ++c) out += (c ? "," : "") + r.columns[c];
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + fmt(row[c]);
    out += '\n';
  }
  return out;
}

// Non-finite doubles become null, which nlohmann does by default.
std::string render_json(const Report& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["passed"] = r.passed;
  for (const auto& [k, v] : r.labels) j["labels"][k] = v;
  for (const auto& [k, v] : r.summary) j["summary"][k] = v;
  j["columns"] = r.columns;
  j["rows"] = r.rows;
  return j.dump(2) + "\n";
}

std::string render_svg(const Report& r) {
  constexpr double W = 640, H = 420, left = 70, right = 20, top = 30, bottom = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : r.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  const bool have_data = xmin <= xmax;
  if (!have_data) xmin = ymin = 0, xmax = ymax = 1;
  if (r.fit_line && have_data) {
    for (double x : {xmin, xmax}) {
      const double y = r.fit_line->first + r.fit_line->second * x;
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax - xmin <= 0) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin <= 0) ymin -= 0.5, ymax += 0.5;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  const auto py = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\""
    << H - bottom << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << left << "\" y=\"" << H - bottom + 16 << "\">" << fmt(xmin) << "</text>\n";
  o << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"end\">"
    << fmt(xmax) << "</text>\n";
  o << "<text x=\"" << left - 4 << "\" y=\"" << H - bottom << "\" text-anchor=\"end\">" << fmt(ymin)
    << "</text>\n";
  o << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << fmt(ymax)
    << "</text>\n";
  o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << xml_escape(r.x_label) << "</text>\n";
  o << "<text x=\"14\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
    << (top + H - bottom) / 2 << ")\">" << xml_escape(r.y_label) << "</text>\n";

  for (std::size_t k = 0; k < r.series.size(); ++k) {
    const auto& s = r.series[k];
    const char* color = colors[k % 5];
    if (s.connect) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
          o << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
        }
      }
      o << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
      }
    }
    o << "<text x=\"" << W - right - 4 << "\" y=\"" << top + 14 * k << "\" text-anchor=\"end\" fill=\""
      << color << "\">" << xml_escape(s.name) << "</text>\n";
  }
  if (r.fit_line && have_data) {
    const auto line = [&](double x) { return r.fit_line->first + r.fit_line->second * x; };
    o << "<line x1=\"" << fmt(px(xmin)) << "\" y1=\"" << fmt(py(line(xmin))) << "\" x2=\"" << fmt(px(xmax))
      << "\" y2=\"" << fmt(py(line(xmax))) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "svg") return ReportFormat::svg;
  fail(ErrorCode::invalid_argument, "unknown report format '" + name + "'");
}

std::string to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::svg: return "svg";
  }
  return "";
}

Report make_report(const RateFit& fit) {
  Report r;
  r.kind = "rate";
  r.columns = {"n", "reps", "mean_wp", "se", "abscissa", "log_mean", "fitted", "timed_out",
               "certificate_checks", "certificate_violations"};
  r.labels = {{"model", to_string(fit.model)}, {"mode", to_string(fit.mode)}, {"distribution", fit.distribution}};
  r.summary = {{"p", fit.p},
               {"intercept", fit.fit.intercept},
               {"intercept_se", fit.fit.intercept_se},
               {"slope", fit.fit.slope},
               {"slope_se", fit.fit.slope_se},
               {"chi2", fit.fit.chi2},
               {"dof", static_cast<double>(fit.fit.dof)},
               {"reference_slope", fit.reference_slope}};
  PlotSeries pts{"mean W_p", {}, {}, false};
  std::size_t violations = 0;
  for (const RateCell& c : fit.cells) {
    const double x = model_abscissa(fit.model, static_cast<double>(c.n));
    const double y = c.mean > 0 ? std::log(c.mean) : std::numeric_limits<double>::quiet_NaN();
    r.rows.push_back({static_cast<double>(c.n), static_cast<double>(c.reps_done), c.mean, c.se, x, y,
                      fit.fit.intercept + fit.fit.slope * x, c.timed_out ? 1.0 : 0.0,
                      static_cast<double>(c.certificate_checks),
                      static_cast<double>(c.certificate_violations)});
    pts.x.push_back(x);
    pts.y.push_back(y);
    violations += c.certificate_violations;
  }
  r.series.push_back(std::move(pts));
  r.fit_line = std::make_pair(fit.fit.intercept, fit.fit.slope);
  const char* xl = fit.model == RateModel::power ? "log n"
                   : fit.model == RateModel::polylog ? "log log n" : "sqrt(log n)";
  r.x_label = xl;
  r.y_label = "log mean W_p";
  r.passed = violations == 0;
  return r;
}

Report make_report(const LowerBoundReport& lb) {
  Report r;
  r.kind = "lowerbound";
  r.columns = {"rep", "kappa", "wp", "bound"};
  r.summary = {{"n", static_cast<double>(lb.n)},
               {"reps", static_cast<double>(lb.reps)},
               {"p", lb.p},
               {"eps_n", lb.eps_n},
               {"packing_dim", static_cast<double>(lb.packing_dim)},
               {"mean_kappa", lb.mean_kappa},
               {"kappa_se", lb.kappa_se},
               {"mean_wp", lb.mean_wp},
               {"min_ratio", lb.min_ratio},
               {"violations", static_cast<double>(lb.violations)}};
  PlotSeries pts{"W_p vs bound", {}, {}, false};
  for (std::size_t i = 0; i < lb.kappa.size(); ++i) {
    const double bound = lb.eps_n * std::pow(lb.kappa[i], 1.0 / lb.p);
    r.rows.push_back({static_cast<double>(i), lb.kappa[i], lb.wp[i], bound});
    pts.x.push_back(bound);
    pts.y.push_back(lb.wp[i]);
  }
  r.series.push_back(std::move(pts));
  r.fit_line = std::make_pair(0.0, 1.0);
  r.x_label = "eps_n kappa^(1/p)";
  r.y_label = "W_p";
  r.passed = lb.violations == 0;
  return r;
}

Report make_report(const ConcentrationReport& cr) {
  Report r;
  r.kind = "concentration";
  r.columns = {"t", "empirical_tail", "mc_se", "bernstein_bound", "lsi_bound"};
  r.summary = {{"n", cr.params.n},
               {"p", cr.params.p},
               {"reps", static_cast<double>(cr.curve.distances.size())},
               {"reference_size", static_cast<double>(cr.curve.reference_size)},
               {"mean_distance", cr.curve.mean_distance},
               {"psi1_norm", cr.psi1_norm},
               {"s", cr.params.s},
               {"V", cr.params.V},
               {"C_lsi", cr.params.C_lsi},
               {"violations", static_cast<double>(cr.violations)}};
  PlotSeries emp{"empirical", {}, {}, false}, bern{"Bernstein", {}, {}, true}, lsi{"log-Sobolev", {}, {}, true};
  for (std::size_t k = 0; k < cr.curve.t.size(); ++k) {
    const double t = cr.curve.t[k];
    r.rows.push_back({t, cr.curve.empirical_tail[k], cr.curve.mc_se[k], cr.bernstein_bound[k], cr.lsi_bound[k]});
    emp.x.push_back(t);
    emp.y.push_back(cr.curve.empirical_tail[k]);
    bern.x.push_back(t);
    bern.y.push_back(cr.bernstein_bound[k]);
    lsi.x.push_back(t);
    lsi.y.push_back(cr.lsi_bound[k]);
  }
  r.series = {std::move(emp), std::move(bern), std::move(lsi)};
  r.x_label = "t";
  r.y_label = "P(|W_p - mean| >= t)";
  r.passed = cr.violations == 0;
  return r;
}

std::string render_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return render_csv(report);
    case ReportFormat::json: return render_json(report);
    case ReportFormat::svg: return render_svg(report);
  }
  return "";
}

std::vector<std::string> emit_report(const Report& report, const std::string& dir,
                                     const std::string& stem,
                                     const std::vector<ReportFormat>& formats) {
  std::error_code ec;
  if (!dir.empty()) std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create '" + dir + "': " + ec.message());
  std::vector<std::string> paths;
  for (ReportFormat f : formats) {
    const std::string path = (std::filesystem::path(dir.empty() ? "." : dir) / (stem + "." + to_string(f))).string();
    write_text_file(path, render_report(report, f));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace empot
