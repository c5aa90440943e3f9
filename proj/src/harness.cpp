#include "empot/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>

#include "empot/covering.hpp"
#include "empot/error.hpp"
#include "empot/exact_ot.hpp"
#include "empot/hierarchical.hpp"
#include "empot/rng.hpp"
#include "parallel.hpp"

namespace empot {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void check_pq(double p, double q) {
  if (!(p >= 1.0)) fail(ErrorCode::domain, "p must be >= 1");
  if (!(q > p)) fail(ErrorCode::domain, "q must exceed p");
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

double zeta_exponent(double p, double q, std::size_t d) {
  check_pq(p, q);
  require(d >= 1, "dimension must be >= 1");
  const double dd = static_cast<double>(d);
  if (near(dd, 2 * p) && near(q, 2 * p)) return 2.0;
  const double sobolev = dd > p ? dd * p / (dd - p) : std::numeric_limits<double>::infinity();
  if (!near(dd, 2 * p) && near(q, std::min(sobolev, 2 * p))) return 1.0;
  if (near(dd, 2 * p) && q > dd) return 1.0;
  return 0.0;
}

double euclidean_rate_exponent(double p, double q, std::size_t d) {
  check_pq(p, q);
  require(d >= 1, "dimension must be >= 1");
  const double moment = std::isinf(q) ? 1.0 / p : 1.0 / p - 1.0 / q;
  return std::min(1.0 / std::max(2 * p, static_cast<double>(d)), moment);
}

double euclidean_reference_rate(double p, double q, std::size_t d, double n, double M_q) {
  require(n >= 2, "n must be >= 2");
  const double zeta = zeta_exponent(p, q, d);
  return M_q * std::pow(n, -euclidean_rate_exponent(p, q, d)) * std::pow(std::log(n), zeta / p);
}

RateModel parse_rate_model(const std::string& name) {
  if (name == "power") return RateModel::power;
  if (name == "polylog") return RateModel::polylog;
  if (name == "subpoly") return RateModel::subpoly;
  fail(ErrorCode::invalid_argument, "unknown rate model '" + name + "'");
}

std::string to_string(RateModel model) {
  switch (model) {
    case RateModel::power: return "power";
    case RateModel::polylog: return "polylog";
    case RateModel::subpoly: return "subpoly";
  }
  return "";
}

EstimatorMode parse_estimator_mode(const std::string& name) {
  if (name == "reference") return EstimatorMode::reference;
  if (name == "two_sample") return EstimatorMode::two_sample;
  fail(ErrorCode::invalid_argument, "unknown estimator mode '" + name + "'");
}

std::string to_string(EstimatorMode mode) {
  return mode == EstimatorMode::reference ? "reference" : "two_sample";
}

double model_abscissa(RateModel model, double n) {
  require(n > 1, "n must exceed 1");
  switch (model) {
    case RateModel::power: return std::log(n);
    case RateModel::polylog: return std::log(std::log(n));
    case RateModel::subpoly: return std::sqrt(std::log(n));
  }
  return 0.0;
}

void RateExperimentConfig::validate() const {
  require(n_grid.size() >= 2, "n_grid needs at least two sizes");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    require(n_grid[i] > n_grid[i - 1], "n_grid must be strictly increasing");
  }
  require(n_grid.front() >= 2, "sample sizes must be >= 2");
  require(reps >= 20, "at least 20 replications per size");
  require(p >= 1.0, "p must be >= 1");
  require(reference_factor >= 1, "reference_factor must be >= 1");
  require(cell_time_limit >= 0.0, "cell_time_limit must be >= 0");
  require(certificate_depth >= 0, "certificate_depth must be >= 0");
}

LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w) {
  require(x.size() == y.size() && x.size() == w.size(), "fit inputs must have equal length");
  require(x.size() >= 2, "fit needs at least two points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(w[i] > 0 && std::isfinite(w[i]), "fit weights must be positive");
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  require(sxx > 0, "fit abscissae must not all coincide");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.slope_se = std::sqrt(1.0 / sxx);
  fit.intercept_se = std::sqrt(1.0 / sw + xbar * xbar / sxx);
  fit.dof = x.size() - 2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.residuals.push_back(r);
    fit.chi2 += w[i] * r * r;
  }
  return fit;
}

RateFit fit_rate(const std::vector<RateCell>& cells, RateModel model) {
  RateFit out;
  out.model = model;
  out.cells = cells;
  std::vector<double> x, y, w;
  for (const RateCell& c : cells) {
    if (c.timed_out || c.reps_done < 2 || !(c.mean > 0)) continue;
    const double rel = std::max(c.se / c.mean, 1e-12);
    x.push_back(model_abscissa(model, static_cast<double>(c.n)));
    y.push_back(std::log(c.mean));
    w.push_back(1.0 / (rel * rel));
  }
  if (x.size() < 2) fail(ErrorCode::budget_exhausted, "fewer than two completed cells to fit");
  out.fit = weighted_linear_fit(x, y, w);
  return out;
}

double reference_slope(const DistributionSpec& dist, double p, RateModel model) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  using Kind = DistributionSpec::Kind;
  switch (model) {
    case RateModel::power:
      if (dist.kind == Kind::uniform_cube || dist.kind == Kind::gaussian) {
        return -euclidean_rate_exponent(p, std::numeric_limits<double>::infinity(), dist.d);
      }
      if (dist.kind == Kind::heavy_tail && dist.q_finite > p) {
        return -euclidean_rate_exponent(p, dist.q_finite, dist.d);
      }
      return nan;
    case RateModel::polylog:
      if (dist.kind == Kind::kl && dist.kl.decay == KLSpec::Decay::poly) return -dist.kl.rate;
      return nan;
    case RateModel::subpoly:
      if (dist.kind == Kind::kl && dist.kl.decay == KLSpec::Decay::exp) {
        return -std::sqrt(2.0 * std::log(dist.kl.rate));
      }
      return nan;
  }
  return nan;
}

RateFit run_rate_experiment(const RateExperimentConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const RhoFunctional cert_rho = RhoFunctional::parse(config.certificate_rho);
  const auto oracle = make_covering_oracle("greedy");

  std::vector<RateCell> cells;
  for (std::size_t n : config.n_grid) {
    const std::size_t m = config.mode == EstimatorMode::reference ? config.reference_factor * n : n;
    const bool certify = config.certificate_check && n <= config.certificate_max_n;
    std::vector<double> dist(config.reps, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> done(config.reps, 0), violated(config.reps, 0);
    std::atomic<bool> expired{false};
    const auto start = Clock::now();

    parallel_for(config.reps, config.threads, [&](std::size_t r) {
      if (config.cell_time_limit > 0) {
        const std::chrono::duration<double> elapsed = Clock::now() - start;
        if (elapsed.count() > config.cell_time_limit) expired.store(true);
      }
      if (expired.load()) return;
      const DiscreteMeasure sample = empirical_measure(config.distribution.sample(n, derive_seed(config.seed, {n, r, 0})));
      const DiscreteMeasure other = empirical_measure(config.distribution.sample(m, derive_seed(config.seed, {n, r, 1})));
      dist[r] = solve_wp(sample, other, config.p).distance;
      if (certify) {
        MultiscaleOptions opts;
        opts.build_plan = false;
        const TelescopeResult tel = telescope_transport(sample, other, cert_rho, *oracle,
                                                        config.certificate_depth, config.p, opts);
        const double certified = std::pow(tel.certified_cost, 1.0 / config.p);
        violated[r] = certified < dist[r] * (1 - 1e-9) - 1e-12 ? 1 : 0;
      }
      done[r] = 1;
    });

    RateCell cell;
    cell.n = n;
    cell.timed_out = expired.load();
    for (std::size_t r = 0; r < config.reps; ++r) {
      if (!done[r]) continue;
      cell.distances.push_back(dist[r]);
      if (certify) {
        ++cell.certificate_checks;
        cell.certificate_violations += violated[r];
      }
    }
    cell.reps_done = cell.distances.size();
    cell.mean = mean_of(cell.distances);
    cell.se = standard_error(cell.distances, cell.mean);
    cells.push_back(std::move(cell));
  }

  RateFit out = fit_rate(cells, config.model);
  out.mode = config.mode;
  out.distribution = config.distribution.to_string();
  out.p = config.p;
  out.reference_slope = reference_slope(config.distribution, config.p, config.model);
  return out;
}

double default_lower_bound_eps(const RhoFunctional& rho, std::size_t n, std::size_t euclidean_dim) {
  require(n >= 2, "n must be >= 2 for the default separation");
  const double ln = std::log(static_cast<double>(n));
  switch (rho.kind()) {
    case RhoFunctional::Kind::exp:
      return std::exp(-std::sqrt(2.0 * std::log(rho.parameter()) * ln));
    case RhoFunctional::Kind::poly:
      return std::pow(ln, -rho.parameter());
    case RhoFunctional::Kind::euclidean:
      require(euclidean_dim >= 1, "Euclidean separation needs a dimension");
      return std::pow(static_cast<double>(n), -1.0 / static_cast<double>(euclidean_dim));
  }
  return 0.0;
}

LowerBoundReport run_lower_bound_experiment(const LowerBoundConfig& config) {
  require(config.n >= 1, "n must be >= 1");
  require(config.reps >= 1, "reps must be >= 1");
  require(config.p >= 1.0, "p must be >= 1");
  const std::size_t n = config.n;

  LowerBoundReport rep;
  rep.n = n;
  rep.reps = config.reps;
  rep.p = config.p;
  rep.eps_n = config.eps_n > 0 ? config.eps_n
              : n >= 2 ? default_lower_bound_eps(config.rho, n, config.euclidean_dim)
                       : 1.0;

  const PackingResult packing = greedy_packing(config.rho, rep.eps_n, n, derive_seed(config.seed, {0x7061636bULL}),
                                               config.packing_budget, config.euclidean_dim);
  if (!packing.target_reached) {
    fail(ErrorCode::budget_exhausted, "packing stopped at " + std::to_string(packing.points.size()) +
                                          " of " + std::to_string(n) + " points");
  }
  rep.packing_size = packing.points.size();
  rep.packing_dim = packing.points.dim();
  const PointCloud& atoms = packing.points;
  const double w = 1.0 / static_cast<double>(n);

  rep.kappa.assign(config.reps, 0.0);
  rep.wp.assign(config.reps, 0.0);
  parallel_for(config.reps, config.threads, [&](std::size_t r) {
    RandomStream rng(config.seed, {1, r});
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(n)];
    std::size_t empty = 0;
    for (std::size_t c : counts) empty += c == 0 ? 1 : 0;
    rep.kappa[r] = static_cast<double>(empty) / static_cast<double>(n);
    if (empty == 0) return;

    if (config.p == 1.0) {
      // W_1 only sees the signed difference: transport the excess of muhat
      // onto its deficit.
      PointCloud plus_pts(atoms.dim(), {}), minus_pts(atoms.dim(), {});
      std::vector<double> plus_w, minus_w;
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = static_cast<double>(counts[i]) * w - w;
        if (counts[i] > 1) {
          plus_pts.push_back(atoms.point(i));
          plus_w.push_back(diff);
        } else if (counts[i] == 0) {
          minus_pts.push_back(atoms.point(i));
          minus_w.push_back(-diff);
        }
      }
      rep.wp[r] = solve_wp(DiscreteMeasure(std::move(plus_pts), std::move(plus_w)),
                           DiscreteMeasure(std::move(minus_pts), std::move(minus_w)), 1.0)
                      .distance;
    } else {
      std::vector<double> emp(n);
      for (std::size_t i = 0; i < n; ++i) emp[i] = static_cast<double>(counts[i]) * w;
      rep.wp[r] = solve_wp(DiscreteMeasure(atoms, std::move(emp)),
                           DiscreteMeasure(atoms, std::vector<double>(n, w)), config.p)
                      .distance;
    }
  });

  rep.mean_kappa = mean_of(rep.kappa);
  rep.kappa_se = standard_error(rep.kappa, rep.mean_kappa);
  rep.mean_wp = mean_of(rep.wp);
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < config.reps; ++r) {
    const double bound = rep.eps_n * std::pow(rep.kappa[r], 1.0 / config.p);
    if (rep.wp[r] < bound - 1e-9) ++rep.violations;
    if (rep.kappa[r] > 0) rep.min_ratio = std::min(rep.min_ratio, rep.wp[r] / bound);
  }
  return rep;
}

ConcentrationReport run_concentration_experiment(const ConcentrationConfig& config) {
  require(config.orlicz_samples >= 1, "orlicz_samples must be >= 1");
  ConcentrationReport out;
  out.curve = mc_deviation_tail(config.distribution, config.n, config.p, config.reps, {},
                                config.seed, config.reference_size, config.threads);
  set_tail_grid(out.curve, deviation_grid(out.curve.distances, config.grid_points));

  const PointCloud draws = config.distribution.sample(config.orlicz_samples, derive_seed(config.seed, {0x6f726cULL}));
  std::vector<double> norms(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) norms[i] = norm(draws.point(i));
  out.psi1_norm = orlicz_norm(norms, 1.0);
  out.params = params_from_psi1(out.psi1_norm, static_cast<double>(config.n), config.p);
  out.params.C_lsi = config.C_lsi;

  for (std::size_t k = 0; k < out.curve.t.size(); ++k) {
    const double t = out.curve.t[k];
    const double bern = wasserstein_mean_tail(out.params, t);
    out.bernstein_bound.push_back(bern);
    out.lsi_bound.push_back(std::min(1.0, 2.0 * lsi_mean_tail(config.C_lsi, static_cast<double>(config.n), config.p, t)));
    if (out.curve.empirical_tail[k] > bern + 3.0 * out.curve.mc_se[k]) ++out.violations;
  }
  return out;
}

}  // namespace empot
