#pragma once

#include <string>

#include "empot/harness.hpp"
#include "empot/measures.hpp"

namespace empot {

/// Whole-file read/write; failures raise ErrorCode::io.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// {"points": [[x, ...], ...], "weights": [w, ...]}; weights default to
/// uniform 1/n.
DiscreteMeasure measure_from_json(const std::string& text);
std::string measure_to_json(const DiscreteMeasure& mu);

/// One point per line, comma separated. An optional header line is
/// recognized by a non-numeric first field; a header column named "weight"
/// supplies weights, otherwise they are uniform.
DiscreteMeasure measure_from_csv(const std::string& text);
std::string points_to_csv(const PointCloud& points);

/// Dispatches on the ".json" / ".csv" extension.
DiscreteMeasure load_measure(const std::string& path);

/// Configs mirror the struct fields; unknown keys are rejected. The
/// distribution is given as its spec string, e.g. "uniform:d=4".
RateExperimentConfig rate_config_from_json(const std::string& text);
LowerBoundConfig lower_bound_config_from_json(const std::string& text);
ConcentrationConfig concentration_config_from_json(const std::string& text);

}  // namespace empot
