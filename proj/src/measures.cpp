#include "empot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "empot/error.hpp"
#include "empot/rho.hpp"

namespace empot {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  require(dim_ >= 1, "point dimension must be at least 1");
  require(coords_.size() % dim_ == 0, "coordinate count is not a multiple of the dimension");
  for (double v : coords_) require(std::isfinite(v), "point coordinates must be finite");
}

void PointCloud::push_back(std::span<const double> p) {
  require(p.size() == dim_, "point has the wrong dimension");
  for (double v : p) require(std::isfinite(v), "point coordinates must be finite");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

double norm(std::span<const double> a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

DiscreteMeasure::DiscreteMeasure(PointCloud points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  require(points_.size() == weights_.size(), "points and weights differ in length");
  for (double w : weights_) require(std::isfinite(w) && w >= 0.0, "weights must be finite and >= 0");
}

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<double> coords,
                                 std::vector<double> weights)
    : DiscreteMeasure(PointCloud(dim, std::move(coords)), std::move(weights)) {}

double DiscreteMeasure::total_mass() const {
  double sum = 0.0;
  for (double w : weights_) sum += w;
  return sum;
}

bool DiscreteMeasure::is_probability() const {
  return std::abs(total_mass() - 1.0) <= kMassTolerance;
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  std::vector<double> coords = points_.coords();
  for (double& v : coords) v *= factor;
  return DiscreteMeasure(dim(), std::move(coords), weights_);
}

DiscreteMeasure DiscreteMeasure::without_zero_atoms(std::vector<std::size_t>* kept) const {
  PointCloud pts(dim(), {});
  std::vector<double> w;
  if (kept) kept->clear();
  for (std::size_t i = 0; i < size(); ++i) {
    if (weights_[i] == 0.0) continue;
    pts.push_back(point(i));
    w.push_back(weights_[i]);
    if (kept) kept->push_back(i);
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure empirical_measure(PointCloud samples) {
  require(!samples.empty(), "empirical measure needs at least one sample");
  const std::size_t n = samples.size();
  return DiscreteMeasure(std::move(samples), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure empirical_measure(const std::vector<std::vector<double>>& samples) {
  require(!samples.empty(), "empirical measure needs at least one sample");
  const std::size_t dim = samples.front().size();
  std::vector<double> coords;
  coords.reserve(dim * samples.size());
  for (const auto& s : samples) {
    require(s.size() == dim, "samples have mixed dimensions");
    coords.insert(coords.end(), s.begin(), s.end());
  }
  return empirical_measure(PointCloud(dim, std::move(coords)));
}

DiscreteMeasure merge_duplicates(const DiscreteMeasure& mu) {
  std::map<std::vector<double>, std::size_t> index;
  PointCloud pts(mu.dim(), {});
  std::vector<double> w;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::vector<double> key(mu.point(i).begin(), mu.point(i).end());
    auto [it, inserted] = index.emplace(std::move(key), w.size());
    if (inserted) {
      pts.push_back(mu.point(i));
      w.push_back(mu.weight(i));
    } else {
      w[it->second] += mu.weight(i);
    }
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

std::vector<std::size_t> TelescopeLayers::atoms_in_layer(int j) const {
  std::vector<std::size_t> atoms;
  for (std::size_t i = 0; i < layer_of_atom.size(); ++i) {
    if (layer_of_atom[i] == j) atoms.push_back(i);
  }
  return atoms;
}

int telescope_layer(double rho_value) {
  if (!std::isfinite(rho_value) || rho_value < 0.0) {
    fail(ErrorCode::domain, "rho value is not finite on a support point");
  }
  if (rho_value <= 1.0) return 0;
  int j = std::max(1, std::ilogb(rho_value));
  // ldexp is exact, so the closed upper endpoint 2^j is handled without
  // rounding surprises.
  while (std::ldexp(1.0, j - 1) >= rho_value) --j;
  while (std::ldexp(1.0, j) < rho_value) ++j;
  return j;
}

TelescopeLayers telescope_split(const DiscreteMeasure& mu, const RhoFunctional& rho) {
  TelescopeLayers layers;
  layers.layer_of_atom.resize(mu.size());
  layers.rho_values.resize(mu.size());
  int max_layer = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double r = rho(mu.point(i));
    if (!std::isfinite(r)) {
      fail(ErrorCode::domain, "rho is not finite at atom " + std::to_string(i));
    }
    layers.rho_values[i] = r;
    layers.layer_of_atom[i] = telescope_layer(r);
    max_layer = std::max(max_layer, layers.layer_of_atom[i]);
  }
  if (mu.size() == 0) return layers;
  layers.layer_masses.assign(max_layer + 1, 0.0);
  layers.scale_factors.resize(max_layer + 1);
  for (int j = 0; j <= max_layer; ++j) layers.scale_factors[j] = std::ldexp(1.0, j);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    layers.layer_masses[layers.layer_of_atom[i]] += mu.weight(i);
  }
  return layers;
}

DiscreteMeasure rescaled_layer(const DiscreteMeasure& mu, const TelescopeLayers& layers, int j) {
  PointCloud pts(mu.dim(), {});
  std::vector<double> w;
  if (j < 0 || j >= layers.num_layers()) return DiscreteMeasure(std::move(pts), std::move(w));
  const double inv_scale = std::ldexp(1.0, -j);
  const double mass = layers.layer_masses[j];
  std::vector<double> buffer(mu.dim());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (layers.layer_of_atom[i] != j) continue;
    auto x = mu.point(i);
    for (std::size_t k = 0; k < x.size(); ++k) buffer[k] = x[k] * inv_scale;
    pts.push_back(buffer);
    w.push_back(mass > 0.0 ? mu.weight(i) / mass : 0.0);
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure reassemble(const std::vector<DiscreteMeasure>& rescaled,
                           const TelescopeLayers& layers) {
  require(static_cast<int>(rescaled.size()) == layers.num_layers(),
          "one rescaled measure per layer expected");
  std::size_t dim = 0;
  for (const auto& m : rescaled) dim = std::max(dim, m.dim());
  require(dim >= 1 || layers.layer_of_atom.empty(), "cannot infer dimension");
  std::vector<std::size_t> cursor(rescaled.size(), 0);
  PointCloud pts(std::max<std::size_t>(dim, 1), {});
  std::vector<double> w;
  std::vector<double> buffer(dim);
  for (int j : layers.layer_of_atom) {
    const DiscreteMeasure& layer = rescaled[j];
    const std::size_t k = cursor[j]++;
    require(k < layer.size(), "rescaled layer has too few atoms");
    const double scale = std::ldexp(1.0, j);
    auto x = layer.point(k);
    for (std::size_t c = 0; c < dim; ++c) buffer[c] = x[c] * scale;
    pts.push_back(buffer);
    w.push_back(layer.weight(k) * layers.layer_masses[j]);
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

}  // namespace empot
