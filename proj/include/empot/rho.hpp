#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace empot {

/// Homogeneous gauge rho(x) = [sum_m (x_m / tau_m)^2]^{1/2} with tau_m <= 1,
/// so rho dominates the Euclidean norm and {rho <= 1} sits inside the unit
/// ball.
///
///   euclidean   tau_m = 1
///   poly(b)     tau_m = m^{-b},          b > 1/2
///   exp(gamma)  tau_m = gamma^{-(m-1)},  gamma > 1
///
/// Coordinates are 1-based in the formulas above. Finite vectors are evaluated
/// on all of their coordinates. `truncation_dim` is the dimension used when
/// the functional has to generate points itself (ellipsoid sampling); zero
/// means "choose from the resolution requested".
class RhoFunctional {
public:
  enum class Kind { euclidean, poly, exp };

  static RhoFunctional euclidean();
  static RhoFunctional poly(double b, std::size_t truncation_dim = 0);
  static RhoFunctional exponential(double gamma, std::size_t truncation_dim = 0);

  /// Parses "euclidean", "poly:b=1", "exp:gamma=2" (optionally ",dim=M").
  static RhoFunctional parse(const std::string& spec);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  /// b for poly, gamma for exp, 0 for euclidean.
  double parameter() const { return param_; }
  std::size_t truncation_dim() const { return truncation_dim_; }

  /// tau_m for m >= 1.
  double tau(std::size_t m) const;
  double operator()(std::span<const double> x) const;

  /// Smallest dimension M such that tau_m < resolution for all m > M
  /// (capped by truncation_dim when set). Euclidean returns 0: no intrinsic
  /// truncation.
  std::size_t effective_dim(double resolution) const;

private:
  RhoFunctional(Kind kind, double param, std::size_t truncation_dim)
      : kind_(kind), param_(param), truncation_dim_(truncation_dim) {}

  Kind kind_ = Kind::euclidean;
  double param_ = 0.0;
  std::size_t truncation_dim_ = 0;
};

}  // namespace empot
