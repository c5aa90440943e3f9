#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace empot {

class RhoFunctional;

/// Fixed-dimension point set stored row-major.
class PointCloud {
public:
  PointCloud() = default;
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }

  void push_back(std::span<const double> p);

private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

double distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Weighted atoms in R^D. Weights are nonnegative; duplicate points stay
/// separate atoms.
class DiscreteMeasure {
public:
  DiscreteMeasure() = default;
  DiscreteMeasure(PointCloud points, std::vector<double> weights);
  DiscreteMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> weights);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.dim(); }
  std::span<const double> point(std::size_t i) const { return points_.point(i); }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const PointCloud& points() const { return points_; }
  double total_mass() const;
  /// |total mass - 1| <= 1e-12.
  bool is_probability() const;

  DiscreteMeasure scaled(double factor) const;
  /// Drops atoms of exactly zero weight; `kept` receives original indices.
  DiscreteMeasure without_zero_atoms(std::vector<std::size_t>* kept = nullptr) const;

private:
  PointCloud points_;
  std::vector<double> weights_;
};

inline constexpr double kMassTolerance = 1e-12;

DiscreteMeasure empirical_measure(const std::vector<std::vector<double>>& samples);
DiscreteMeasure empirical_measure(PointCloud samples);

/// Atoms merged by exact coordinate equality, weights summed.
DiscreteMeasure merge_duplicates(const DiscreteMeasure& mu);

// ---------------------------------------------------------------------------
// Telescope layering by rho-magnitude.
//
// Layer 0 holds atoms with rho <= 1; layer j >= 1 holds rho in (2^{j-1}, 2^j].

struct TelescopeLayers {
  std::vector<int> layer_of_atom;
  std::vector<double> layer_masses;
  std::vector<double> scale_factors;  // 2^j
  std::vector<double> rho_values;

  int num_layers() const { return static_cast<int>(layer_masses.size()); }
  std::vector<std::size_t> atoms_in_layer(int j) const;
};

int telescope_layer(double rho_value);

TelescopeLayers telescope_split(const DiscreteMeasure& mu, const RhoFunctional& rho);

/// Atoms of layer j mapped by x -> 2^{-j} x, weights renormalized to one.
/// Empty layers give an empty measure.
DiscreteMeasure rescaled_layer(const DiscreteMeasure& mu, const TelescopeLayers& layers, int j);

/// Inverse of the split: undo the scaling, weight each layer by its mass and
/// concatenate in original atom order.
DiscreteMeasure reassemble(const std::vector<DiscreteMeasure>& rescaled,
                           const TelescopeLayers& layers);

}  // namespace empot
