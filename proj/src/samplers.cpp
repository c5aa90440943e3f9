#include "empot/samplers.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "empot/error.hpp"
#include "empot/rng.hpp"

namespace empot {

namespace {

/// sum_{m > M} m^{-s} for s > 1 via Euler-Maclaurin once M is large enough.
double power_tail(double s, std::size_t M) {
  constexpr std::size_t kDirect = 64;
  double head = 0.0;
  std::size_t start = M;
  while (start < kDirect) {
    ++start;
    head += std::pow(static_cast<double>(start), -s);
  }
  const double x = static_cast<double>(start);
  const double tail = std::pow(x, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(x, -s) +
                      s / 12.0 * std::pow(x, -s - 1.0) -
                      s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(x, -s - 3.0);
  return head + tail;
}

struct Options {
  std::string name;
  std::map<std::string, std::string> values;
};

Options split_spec(const std::string& spec) {
  Options out;
  const auto colon = spec.find(':');
  out.name = spec.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::stringstream rest(spec.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::invalid_argument, "bad spec item '" + item + "'");
    out.values[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double number(const Options& o, const std::string& key, double fallback, bool required = false) {
  auto it = o.values.find(key);
  if (it == o.values.end()) {
    if (required) fail(ErrorCode::invalid_argument, "spec '" + o.name + "' needs " + key + "=...");
    return fallback;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != it->second.size()) {
    fail(ErrorCode::invalid_argument, "bad value '" + it->second + "' for " + key);
  }
  return v;
}

std::size_t count(const Options& o, const std::string& key, std::size_t fallback,
                  bool required = false) {
  const double v = number(o, key, static_cast<double>(fallback), required);
  require(v >= 0 && v == std::floor(v), key + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

void reject_unknown(const Options& o, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : o.values) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorCode::invalid_argument, "unknown key '" + key + "' in '" + o.name + "' spec");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ScoreDistribution parse_score_distribution(const std::string& name) {
  if (name == "gaussian") return ScoreDistribution::gaussian;
  if (name == "uniform") return ScoreDistribution::uniform;
  if (name == "laplace") return ScoreDistribution::laplace;
  fail(ErrorCode::invalid_argument, "unknown score distribution '" + name + "'");
}

std::string to_string(ScoreDistribution scores) {
  switch (scores) {
    case ScoreDistribution::gaussian:
      return "gaussian";
    case ScoreDistribution::uniform:
      return "uniform";
    case ScoreDistribution::laplace:
      return "laplace";
  }
  return "gaussian";
}

double draw_score(ScoreDistribution scores, RandomStream& rng) {
  switch (scores) {
    case ScoreDistribution::gaussian:
      return rng.normal();
    case ScoreDistribution::uniform:
      return std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
    case ScoreDistribution::laplace: {
      const double e = rng.exponential() / std::numbers::sqrt2;
      return (rng.next() >> 63) ? e : -e;
    }
  }
  return 0.0;
}

double score_q_norm(ScoreDistribution scores, double q) {
  require(q > 0.0 && std::isfinite(q), "q must be positive");
  double moment = 0.0;
  switch (scores) {
    case ScoreDistribution::gaussian:
      moment = std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
      break;
    case ScoreDistribution::uniform:
      moment = std::pow(3.0, q / 2.0) / (q + 1.0);
      break;
    case ScoreDistribution::laplace:
      moment = std::pow(std::numbers::sqrt2 / 2.0, q) * std::tgamma(q + 1.0);
      break;
  }
  return std::pow(moment, 1.0 / q);
}

// ---------------------------------------------------------------------------

KLSpec KLSpec::poly(double b0, double c0, ScoreDistribution scores, std::size_t truncation_dim) {
  require(std::isfinite(b0) && b0 > 0.0, "poly decay needs b0 > 0");
  require(std::isfinite(c0) && c0 >= 0.0, "c0 must be >= 0");
  return KLSpec{Decay::poly, b0, c0, scores, truncation_dim};
}

KLSpec KLSpec::exponential(double gamma0, double c0, ScoreDistribution scores,
                           std::size_t truncation_dim) {
  require(std::isfinite(gamma0) && gamma0 > 1.0, "exp decay needs gamma0 > 1");
  require(std::isfinite(c0) && c0 >= 0.0, "c0 must be >= 0");
  return KLSpec{Decay::exp, gamma0, c0, scores, truncation_dim};
}

KLSpec KLSpec::parse(const std::string& spec) {
  const Options o = split_spec(spec);
  reject_unknown(o, {"b0", "gamma0", "c0", "dim", "scores"});
  ScoreDistribution scores = ScoreDistribution::gaussian;
  if (auto it = o.values.find("scores"); it != o.values.end()) {
    scores = parse_score_distribution(it->second);
  }
  const double c0 = number(o, "c0", 1.0);
  const std::size_t dim = count(o, "dim", 0);
  if (o.name == "poly") return poly(number(o, "b0", 0, true), c0, scores, dim);
  if (o.name == "exp") return exponential(number(o, "gamma0", 0, true), c0, scores, dim);
  fail(ErrorCode::invalid_argument, "unknown KL class '" + o.name + "'");
}

std::string KLSpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  out << (decay == Decay::poly ? "poly:b0=" : "exp:gamma0=") << rate;
  if (c0 != 1.0) out << ",c0=" << c0;
  if (truncation_dim != 0) out << ",dim=" << truncation_dim;
  if (scores != ScoreDistribution::gaussian) out << ",scores=" << empot::to_string(scores);
  return out.str();
}

double KLSpec::sigma(std::size_t m) const {
  require(m >= 1, "sigma index is 1-based");
  if (decay == Decay::poly) return c0 * std::pow(static_cast<double>(m), -(rate + 0.5));
  return c0 * std::pow(rate, -static_cast<double>(m - 1));
}

double KLSpec::tail_energy_fraction(std::size_t M) const {
  if (decay == Decay::exp) return std::pow(rate, -2.0 * static_cast<double>(M));
  const double s = 2.0 * rate + 1.0;
  return power_tail(s, M) / power_tail(s, 0);
}

std::size_t KLSpec::dimension(double tail_tol) const {
  if (truncation_dim != 0) return truncation_dim;
  require(tail_tol > 0.0 && tail_tol < 1.0, "tail tolerance must lie in (0, 1)");
  std::size_t M = 1;
  while (tail_energy_fraction(M) > tail_tol) ++M;
  return M;
}

PointCloud sample_kl(const KLSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::size_t M = spec.dimension();
  std::vector<double> sig(M);
  for (std::size_t m = 0; m < M; ++m) sig[m] = spec.sigma(m + 1);
  std::vector<double> coords(n * M);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, {i});
    for (std::size_t m = 0; m < M; ++m) coords[i * M + m] = sig[m] * draw_score(spec.scores, rng);
  }
  return PointCloud(M, std::move(coords));
}

double fpc_moment_bound(const KLSpec& spec, const RhoFunctional& rho, double q,
                        double score_norm) {
  require(q >= 2.0, "the moment bound needs q >= 2");
  require(score_norm >= 0.0 && std::isfinite(score_norm), "score norm must be finite");
  const double c2 = spec.c0 * spec.c0;
  double series = 0.0;
  using K = RhoFunctional::Kind;
  if (spec.decay == KLSpec::Decay::poly) {
    // (sigma_m / tau_m)^2 = c0^2 m^{-(2 b0 + 1)} tau_m^{-2}
    double b = 0.0;
    if (rho.kind() == K::poly) b = rho.parameter();
    if (rho.kind() == K::exp || (rho.kind() == K::poly && b >= spec.rate)) {
      fail(ErrorCode::domain, "sum (sigma_m / tau_m)^2 diverges: decay " + spec.to_string() +
                                  " is not in the class of " + rho.to_string());
    }
    series = c2 * power_tail(2.0 * (spec.rate - b) + 1.0, 0);
  } else {
    const double g0 = spec.rate;
    if (rho.kind() == K::exp) {
      if (rho.parameter() >= g0) {
        fail(ErrorCode::domain, "sum (sigma_m / tau_m)^2 diverges: decay " + spec.to_string() +
                                    " is not in the class of " + rho.to_string());
      }
      const double r = rho.parameter() / g0;
      series = c2 / (1.0 - r * r);
    } else {
      double term = 0.0;
      std::size_t m = 1;
      do {
        term = std::pow(spec.sigma(m) / rho.tau(m), 2.0);
        series += term;
        ++m;
      } while (term > 1e-18 * series || m < 8);
    }
  }
  return score_norm * std::sqrt(series);
}

MomentCertificate estimate_moment(const PointCloud& samples, const RhoFunctional& rho, double q,
                                  std::optional<double> analytic) {
  require(q >= 1.0 && std::isfinite(q), "moment order must be >= 1");
  require(!samples.empty(), "moment estimate needs samples");
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = rho(samples.point(i));
    if (!std::isfinite(r)) fail(ErrorCode::domain, "rho is not finite on a sample");
    sum += std::pow(r, q);
  }
  MomentCertificate cert;
  cert.q = q;
  cert.sample_size = samples.size();
  cert.M_q_empirical = std::pow(sum / static_cast<double>(samples.size()), 1.0 / q);
  cert.M_q_analytic = analytic;
  return cert;
}

PointCloud sample_heavy_tail(std::size_t d, double q_finite, std::size_t n, std::uint64_t seed,
                             double index) {
  require(d >= 1, "dimension must be >= 1");
  require(q_finite > 1.0, "q_finite must exceed 1");
  require(index > q_finite, "tail index must exceed q_finite");
  std::vector<double> coords(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, {i});
    const double radius = std::pow(rng.uniform_open0(), -1.0 / index);
    double* x = coords.data() + i * d;
    if (d == 1) {
      x[0] = (rng.next() >> 63) ? radius : -radius;
      continue;
    }
    double sq = 0.0;
    do {
      sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = rng.normal();
        sq += x[k] * x[k];
      }
    } while (sq == 0.0);
    const double scale = radius / std::sqrt(sq);
    for (std::size_t k = 0; k < d; ++k) x[k] *= scale;
  }
  return PointCloud(d, std::move(coords));
}

PointCloud sample_heavy_tail(std::size_t d, double q_finite, std::size_t n, std::uint64_t seed) {
  return sample_heavy_tail(d, q_finite, n, seed, q_finite + 0.25);
}

// ---------------------------------------------------------------------------

DistributionSpec DistributionSpec::parse(const std::string& spec) {
  const Options o = split_spec(spec);
  DistributionSpec out;
  if (o.name == "uniform" || o.name == "gaussian") {
    reject_unknown(o, {"d"});
    out.kind = o.name == "uniform" ? Kind::uniform_cube : Kind::gaussian;
    out.d = count(o, "d", 0, true);
    require(out.d >= 1, "d must be >= 1");
  } else if (o.name == "heavy") {
    reject_unknown(o, {"d", "q", "index"});
    out.kind = Kind::heavy_tail;
    out.d = count(o, "d", 0, true);
    out.q_finite = number(o, "q", 0, true);
    out.tail_index = number(o, "index", out.q_finite + 0.25);
    require(out.d >= 1, "d must be >= 1");
    require(out.q_finite > 1.0 && out.tail_index > out.q_finite,
            "heavy tail needs q > 1 and index > q");
  } else if (o.name == "poly" || o.name == "exp") {
    out.kind = Kind::kl;
    out.kl = KLSpec::parse(spec);
    out.d = out.kl.dimension();
  } else {
    fail(ErrorCode::invalid_argument, "unknown distribution '" + o.name + "'");
  }
  return out;
}

std::string DistributionSpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::uniform_cube:
      out << "uniform:d=" << d;
      break;
    case Kind::gaussian:
      out << "gaussian:d=" << d;
      break;
    case Kind::heavy_tail:
      out << "heavy:d=" << d << ",q=" << q_finite << ",index=" << tail_index;
      break;
    case Kind::kl:
      return kl.to_string();
  }
  return out.str();
}

std::size_t DistributionSpec::dimension() const { return kind == Kind::kl ? kl.dimension() : d; }

PointCloud DistributionSpec::sample(std::size_t n, std::uint64_t seed) const {
  switch (kind) {
    case Kind::kl:
      return sample_kl(kl, n, seed);
    case Kind::heavy_tail:
      return sample_heavy_tail(d, q_finite, n, seed, tail_index);
    case Kind::uniform_cube:
    case Kind::gaussian: {
      std::vector<double> coords(n * d);
      for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(seed, {i});
        for (std::size_t k = 0; k < d; ++k) {
          coords[i * d + k] = kind == Kind::gaussian ? rng.normal() : rng.uniform();
        }
      }
      return PointCloud(d, std::move(coords));
    }
  }
  return PointCloud();
}

}  // namespace empot
