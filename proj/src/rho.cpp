#include "empot/rho.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "empot/error.hpp"

namespace empot {

RhoFunctional RhoFunctional::euclidean() { return RhoFunctional(Kind::euclidean, 0.0, 0); }

RhoFunctional RhoFunctional::poly(double b, std::size_t truncation_dim) {
  require(std::isfinite(b) && b > 0.5, "poly ellipsoid needs b > 1/2");
  return RhoFunctional(Kind::poly, b, truncation_dim);
}

RhoFunctional RhoFunctional::exponential(double gamma, std::size_t truncation_dim) {
  require(std::isfinite(gamma) && gamma > 1.0, "exp ellipsoid needs gamma > 1");
  return RhoFunctional(Kind::exp, gamma, truncation_dim);
}

namespace {

double parse_number(const std::string& text, const std::string& spec) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    fail(ErrorCode::invalid_argument, "bad number '" + text + "' in rho spec '" + spec + "'");
  }
  return value;
}

}  // namespace

RhoFunctional RhoFunctional::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  double param = 0.0;
  bool have_param = false;
  std::size_t dim = 0;

  if (colon != std::string::npos) {
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) fail(ErrorCode::invalid_argument, "bad rho spec '" + spec + "'");
      const std::string key = item.substr(0, eq);
      const double value = parse_number(item.substr(eq + 1), spec);
      if (key == "dim") {
        require(value >= 1 && value == std::floor(value), "rho spec dim must be a positive integer");
        dim = static_cast<std::size_t>(value);
      } else if ((key == "b" && name == "poly") || (key == "gamma" && name == "exp")) {
        param = value;
        have_param = true;
      } else {
        fail(ErrorCode::invalid_argument, "unknown key '" + key + "' in rho spec '" + spec + "'");
      }
    }
  }

  if (name == "euclidean") return euclidean();
  if (name == "poly") {
    require(have_param, "poly rho spec needs b=...");
    return poly(param, dim);
  }
  if (name == "exp") {
    require(have_param, "exp rho spec needs gamma=...");
    return exponential(param, dim);
  }
  fail(ErrorCode::invalid_argument, "unknown rho kind '" + name + "'");
}

std::string RhoFunctional::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::euclidean:
      return "euclidean";
    case Kind::poly:
      out << "poly:b=" << param_;
      break;
    case Kind::exp:
      out << "exp:gamma=" << param_;
      break;
  }
  if (truncation_dim_ != 0) out << ",dim=" << truncation_dim_;
  return out.str();
}

double RhoFunctional::tau(std::size_t m) const {
  require(m >= 1, "tau index is 1-based");
  switch (kind_) {
    case Kind::euclidean:
      return 1.0;
    case Kind::poly:
      return std::pow(static_cast<double>(m), -param_);
    case Kind::exp:
      return std::pow(param_, -static_cast<double>(m - 1));
  }
  return 1.0;
}

double RhoFunctional::operator()(std::span<const double> x) const {
  double sum = 0.0;
  if (kind_ == Kind::euclidean) {
    for (double v : x) sum += v * v;
    return std::sqrt(sum);
  }
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double scaled = x[m] / tau(m + 1);
    sum += scaled * scaled;
  }
  return std::sqrt(sum);
}

std::size_t RhoFunctional::effective_dim(double resolution) const {
  require(resolution > 0.0, "resolution must be positive");
  std::size_t dim = 0;
  switch (kind_) {
    case Kind::euclidean:
      return 0;
    case Kind::poly:
      dim = static_cast<std::size_t>(std::floor(std::pow(resolution, -1.0 / param_)));
      break;
    case Kind::exp:
      dim = resolution >= 1.0
                ? 1
                : static_cast<std::size_t>(
                      std::floor(1.0 + std::log(1.0 / resolution) / std::log(param_)));
      break;
  }
  dim = std::max<std::size_t>(dim, 1);
  if (truncation_dim_ != 0) dim = std::min(dim, truncation_dim_);
  return dim;
}

}  // namespace empot
