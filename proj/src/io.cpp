#include "empot/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "empot/error.hpp"

namespace empot {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("malformed JSON: ") + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known) {
  require(j.is_object(), "config must be a JSON object");
  for (const auto& item : j.items()) {
    require(known.count(item.key()) != 0, "unknown config key '" + item.key() + "'");
  }
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::invalid_argument, std::string("bad value for '") + key + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  while (used < s.size() && (s[used] == ' ' || s[used] == '\r' || s[used] == '\t')) ++used;
  return used == s.size();
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

DiscreteMeasure measure_from_json(const std::string& text) {
  const json j = parse_json(text);
  require(j.is_object() && j.contains("points"), "measure JSON needs a 'points' array");
  std::vector<std::vector<double>> pts;
  read_field(j, "points", pts);
  require(!pts.empty(), "measure needs at least one point");
  const std::size_t dim = pts.front().size();
  require(dim >= 1, "points need at least one coordinate");
  std::vector<double> coords;
  for (const auto& p : pts) {
    require(p.size() == dim, "points must share one dimension");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  std::vector<double> weights(pts.size(), 1.0 / static_cast<double>(pts.size()));
  read_field(j, "weights", weights);
  require(weights.size() == pts.size(), "weights must match points");
  return DiscreteMeasure(dim, std::move(coords), std::move(weights));
}

std::string measure_to_json(const DiscreteMeasure& mu) {
  json pts = json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto p = mu.point(i);
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return json{{"points", pts}, {"weights", mu.weights()}}.dump() + "\n";
}

DiscreteMeasure measure_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> coords, weights;
  long weight_col = -1;
  std::size_t dim = 0, rows = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    double v = 0;
    if (first && !parse_number(cells.front(), v)) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == "weight") weight_col = static_cast<long>(c);
      }
      first = false;
      continue;
    }
    first = false;
    const std::size_t row_dim = cells.size() - (weight_col >= 0 ? 1 : 0);
    if (rows == 0) dim = row_dim;
    require(row_dim == dim && dim >= 1, "CSV rows must share one dimension");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      require(parse_number(cells[c], v), "non-numeric CSV field '" + cells[c] + "'");
      if (static_cast<long>(c) == weight_col) weights.push_back(v);
      else coords.push_back(v);
    }
    ++rows;
  }
  require(rows >= 1, "CSV has no points");
  if (weight_col < 0) weights.assign(rows, 1.0 / static_cast<double>(rows));
  return DiscreteMeasure(dim, std::move(coords), std::move(weights));
}

std::string points_to_csv(const PointCloud& points) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << p[k];
    out << '\n';
  }
  return out.str();
}

DiscreteMeasure load_measure(const std::string& path) {
  const auto ends_with = [&](const std::string& ext) {
    return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
  };
  if (ends_with(".json")) return measure_from_json(read_text_file(path));
  if (ends_with(".csv")) return measure_from_csv(read_text_file(path));
  fail(ErrorCode::invalid_argument, "measure file must end in .json or .csv: '" + path + "'");
}

RateExperimentConfig rate_config_from_json(const std::string& text) {
  const json j = parse_json(text);
  reject_unknown(j, {"distribution", "p", "n_grid", "reps", "seed", "rate_model", "mode",
                     "reference_factor", "cell_time_limit", "threads", "certificate_check",
                     "certificate_max_n", "certificate_depth", "certificate_rho"});
  require(j.contains("distribution"), "config needs 'distribution'");
  RateExperimentConfig cfg;
  std::string dist, model = "power", mode = "reference";
  read_field(j, "distribution", dist);
  read_field(j, "rate_model", model);
  read_field(j, "mode", mode);
  cfg.distribution = DistributionSpec::parse(dist);
  cfg.model = parse_rate_model(model);
  cfg.mode = parse_estimator_mode(mode);
  read_field(j, "p", cfg.p);
  read_field(j, "n_grid", cfg.n_grid);
  read_field(j, "reps", cfg.reps);
  read_field(j, "seed", cfg.seed);
  read_field(j, "reference_factor", cfg.reference_factor);
  read_field(j, "cell_time_limit", cfg.cell_time_limit);
  read_field(j, "threads", cfg.threads);
  read_field(j, "certificate_check", cfg.certificate_check);
  read_field(j, "certificate_max_n", cfg.certificate_max_n);
  read_field(j, "certificate_depth", cfg.certificate_depth);
  read_field(j, "certificate_rho", cfg.certificate_rho);
  cfg.validate();
  return cfg;
}

LowerBoundConfig lower_bound_config_from_json(const std::string& text) {
  const json j = parse_json(text);
  reject_unknown(j, {"rho", "euclidean_dim", "n", "reps", "p", "eps_n", "seed", "packing_budget", "threads"});
  LowerBoundConfig cfg;
  std::string rho = cfg.rho.to_string();
  read_field(j, "rho", rho);
  cfg.rho = RhoFunctional::parse(rho);
  read_field(j, "euclidean_dim", cfg.euclidean_dim);
  read_field(j, "n", cfg.n);
  read_field(j, "reps", cfg.reps);
  read_field(j, "p", cfg.p);
  read_field(j, "eps_n", cfg.eps_n);
  read_field(j, "seed", cfg.seed);
  read_field(j, "packing_budget", cfg.packing_budget);
  read_field(j, "threads", cfg.threads);
  return cfg;
}

ConcentrationConfig concentration_config_from_json(const std::string& text) {
  const json j = parse_json(text);
  reject_unknown(j, {"distribution", "n", "p", "reps", "grid_points", "reference_size",
                     "orlicz_samples", "C_lsi", "seed", "threads"});
  require(j.contains("distribution"), "config needs 'distribution'");
  ConcentrationConfig cfg;
  std::string dist;
  read_field(j, "distribution", dist);
  cfg.distribution = DistributionSpec::parse(dist);
  read_field(j, "n", cfg.n);
  read_field(j, "p", cfg.p);
  read_field(j, "reps", cfg.reps);
  read_field(j, "grid_points", cfg.grid_points);
  read_field(j, "reference_size", cfg.reference_size);
  read_field(j, "orlicz_samples", cfg.orlicz_samples);
  read_field(j, "C_lsi", cfg.C_lsi);
  read_field(j, "seed", cfg.seed);
  read_field(j, "threads", cfg.threads);
  return cfg;
}

}  // namespace empot
