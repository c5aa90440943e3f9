// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: empot_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "empot/concentration.hpp"
#include "empot/covering.hpp"
#include "empot/error.hpp"
#include "empot/exact_ot.hpp"
#include "empot/harness.hpp"
#include "empot/hierarchical.hpp"
#include "test_util.hpp"

using namespace empot;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

bool strictly_decreasing(const std::vector<RateCell>& cells) {
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (!(cells[i].mean < cells[i - 1].mean)) return false;
  }
  return true;
}

const std::vector<std::size_t> kRateGrid = {128, 256, 512, 1024, 2048};

RateFit rate_run(const std::string& dist, RateModel model, std::size_t reps, std::uint64_t seed) {
  RateExperimentConfig cfg;
  cfg.distribution = DistributionSpec::parse(dist);
  cfg.p = 1.0;
  cfg.n_grid = kRateGrid;
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.model = model;
  cfg.mode = EstimatorMode::two_sample;
  return run_rate_experiment(cfg);
}

// 1. Exact solver against exhaustive assignment search.
Outcome oracle_equivalence() {
  RandomStream rng(101);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0;
  const double ps[] = {1.0, 1.5, 2.0};
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 2 + rng.below(6);
    const std::size_t d = 1 + rng.below(3);
    const double p = ps[rng.below(3)];
    const auto mu = testgen::random_measure(rng, n, d, true);
    const auto nu = testgen::random_measure(rng, n, d, true);
    const double a = solve_wp(mu, nu, p).distance;
    const double b = brute_force_wp(mu, nu, p);
    worst = std::max(worst, std::abs(a - b));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-9 && secs < 30.0,
          fmt("500 instances, max |solve - brute| = %.3g, %.2f s", worst, secs)};
}

// Measures on shared atoms whose restrictions to every cell are
// proportional; some cells carry nu mass only.
std::pair<DiscreteMeasure, DiscreteMeasure> proportional_pair(RandomStream& rng, std::vector<int>& cells) {
  const std::size_t n = 2 + rng.below(30);
  const int k = 1 + static_cast<int>(rng.below(8));
  cells.assign(n, 0);
  for (auto& c : cells) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  const auto pts = testgen::random_points(rng, n, 2);
  std::vector<double> a(n), b(n);
  std::vector<double> target(k), mass(k, 0.0);
  std::vector<bool> empty(k);
  for (int c = 0; c < k; ++c) {
    target[c] = 0.05 + rng.uniform();
    empty[c] = rng.uniform() < 0.2;
  }
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = empty[cells[i]] ? 0.0 : 0.05 + rng.uniform();
    mass[cells[i]] += a[i];
  }
  if (std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; })) {
    a[0] = 1.0;
    mass[cells[0]] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cells[i];
    b[i] = mass[c] > 0 ? a[i] / mass[c] * target[c] : rng.uniform();
  }
  double sa = 0, sb = 0;
  for (double x : a) sa += x;
  for (double x : b) sb += x;
  for (double& x : a) x /= sa;
  for (double& x : b) x /= sb;
  return {DiscreteMeasure(pts, a), DiscreteMeasure(pts, b)};
}

// 2. Marginals of every coupling constructor and the DSS identity.
Outcome coupling_validity() {
  RandomStream rng(202);
  const GreedyCoverOracle greedy;
  const GridCoverOracle grid;
  const auto rho = RhoFunctional::euclidean();
  std::size_t failures = 0;
  double worst_marginal = 0, worst_identity = 0;
  auto record = [&](const CouplingPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    const auto m = check_marginals(plan, mu, nu);
    worst_marginal = std::max({worst_marginal, m.max_row_error, m.max_col_error});
    if (!m.ok(1e-9)) ++failures;
  };
  for (int i = 0; i < 200; ++i) {
    const double p = i % 2 ? 2.0 : 1.0;
    const std::size_t d = 1 + rng.below(3);
    const bool lattice = i % 3 == 0;
    auto draw = [&](std::size_t n) {
      return lattice ? testgen::lattice_measure(rng, n, d, 4) : testgen::random_measure(rng, n, d);
    };
    const auto mu = testgen::scaled_points(draw(5 + rng.below(30)), 0.5);
    const auto nu = testgen::scaled_points(draw(5 + rng.below(30)), 0.5);
    record(solve_wp(mu, nu, p).plan, mu, nu);

    const CoveringOracle& oracle = i % 4 == 1 ? static_cast<const CoveringOracle&>(grid) : greedy;
    const int levels = 1 + static_cast<int>(rng.below(4));
    record(multiscale_transport(mu, nu, rho, oracle, levels, p).plan, mu, nu);

    const auto wide_mu = testgen::scaled_points(mu, 12.0), wide_nu = testgen::scaled_points(nu, 5.0);
    record(telescope_transport(wide_mu, wide_nu, rho, oracle, levels, p).plan, wide_mu, wide_nu);

    std::vector<int> cells;
    const auto [a, b] = proportional_pair(rng, cells);
    const auto dss = dss_coupling(a, b, cells);
    record(dss.plan, a, b);
    const double gap = std::abs(dss.off_diagonal_mass - dss.predicted_off_diagonal);
    worst_identity = std::max(worst_identity, gap);
    if (gap > 1e-12) ++failures;
  }
  return {failures == 0, fmt("200 instances x 4 constructors, max marginal error %.3g, max DSS identity gap %.3g",
                             worst_marginal, worst_identity)};
}

// 3. exact <= multiscale plan cost <= certified cost on the unit square.
Outcome certificate_sandwich() {
  RandomStream rng(303);
  const GreedyCoverOracle oracle;
  std::size_t violations = 0;
  double min_slack_low = INFINITY, min_slack_high = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const auto mu = testgen::random_measure(rng, 40, 2, true);
    const auto nu = testgen::random_measure(rng, 40, 2, true);
    const auto tree = build_nested_tree(union_support(mu, nu), oracle, 4, std::sqrt(2.0));
    const auto ms = multiscale_transport(mu, nu, tree, 1.0);
    const double exact = solve_wp(mu, nu, 1.0).distance;
    min_slack_low = std::min(min_slack_low, ms.plan_cost - exact);
    min_slack_high = std::min(min_slack_high, ms.certified_cost - ms.plan_cost);
    if (exact > ms.plan_cost + 1e-12 || ms.plan_cost > ms.certified_cost + 1e-12) ++violations;
  }
  return {violations == 0, fmt("100 instances, %zu violations, min(plan - exact) = %.3g, min(cert - plan) = %.3g",
                               violations, min_slack_low, min_slack_high)};
}

// 4. Power-law exponent in d = 4 and bounded d = 6 / d = 4 ratio.
Outcome euclidean_rate() {
  const auto d4 = rate_run("uniform:d=4", RateModel::power, 50, 404);
  const auto d6 = rate_run("uniform:d=6", RateModel::power, 20, 406);
  double lo = INFINITY, hi = 0;
  for (std::size_t i = 0; i < d4.cells.size(); ++i) {
    const double r = d6.cells[i].mean / d4.cells[i].mean;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double slope = d4.fit.slope;
  const bool pass = slope >= -0.33 && slope <= -0.17 && hi / lo <= 2.0;
  return {pass, fmt("d=4 slope %.4f +- %.4f (window [-0.33, -0.17]); W(d=6)/W(d=4) in [%.3f, %.3f], spread %.3f <= 2",
                    slope, d4.fit.slope_se, lo, hi, hi / lo)};
}

// 5. Polynomial decay b0 = 1: W_1 ~ 1 / log n.
Outcome poly_rate() {
  const auto fit = rate_run("poly:b0=1", RateModel::polylog, 20, 505);
  double lo = INFINITY, hi = 0;
  for (const auto& c : fit.cells) {
    const double v = c.mean * std::log(static_cast<double>(c.n));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const bool mono = strictly_decreasing(fit.cells);
  return {hi / lo < 2.0 && mono,
          fmt("mean*log n in [%.4f, %.4f], ratio %.3f < 2; monotone decrease: %s", lo, hi, hi / lo,
              mono ? "yes" : "no")};
}

// 6. Exponential decay gamma0 = 2: log W_1 linear in sqrt(log n).
Outcome exp_rate() {
  const auto fit = rate_run("exp:gamma0=2", RateModel::subpoly, 20, 606);
  const double target = -std::sqrt(2.0 * std::log(2.0));
  const double rel = std::abs(fit.fit.slope - target) / std::abs(target);
  const bool mono = strictly_decreasing(fit.cells);
  return {rel <= 0.30 && mono, fmt("slope %.4f vs %.4f (rel. dev. %.3f <= 0.30); monotone decrease: %s",
                                   fit.fit.slope, target, rel, mono ? "yes" : "no")};
}

// 7. Packing lower bound with gamma = 2.
Outcome lower_bound() {
  LowerBoundConfig cfg;
  cfg.rho = RhoFunctional::exponential(2.0);
  cfg.n = 1000;
  cfg.reps = 500;
  cfg.seed = 707;
  const auto r = run_lower_bound_experiment(cfg);
  const double dev = std::abs(r.mean_kappa - std::exp(-1.0));
  return {dev <= 0.02 && r.violations == 0,
          fmt("eps_n %.5f, packing %zu pts in dim %zu; mean kappa %.5f (|. - 1/e| = %.5f <= 0.02); "
              "violations %zu/%zu, min ratio %.3f",
              r.eps_n, r.packing_size, r.packing_dim, r.mean_kappa, dev, r.violations, r.reps, r.min_ratio)};
}

// 8. Gaussian concentration tail and the bounded-sum Bernstein reduction.
Outcome concentration() {
  double worst = 0;
  for (double b : {0.1, 1.0, 7.5}) {
    for (std::size_t n : {1u, 5u, 40u}) {
      std::vector<double> var(n);
      for (std::size_t i = 0; i < n; ++i) var[i] = b * b * (0.01 + 0.2 * static_cast<double>(i % 4));
      double s2 = 0;
      for (double v : var) s2 += v;
      const auto params = bounded_sum_bernstein(var, b);
      for (double t : {0.01, 0.3, 1.0, 4.0, 25.0}) {
        const double classical = std::exp(-t * t / (2.0 * (s2 + b * t / 3.0)));
        const double got = bernstein_mcdiarmid_tail(params, t);
        worst = std::max(worst, std::abs(got - classical) / classical);
      }
    }
  }
  ConcentrationConfig cfg;
  cfg.distribution = DistributionSpec::parse("gaussian:d=4");
  cfg.n = 256;
  cfg.p = 1.0;
  cfg.reps = 2000;
  cfg.grid_points = 20;
  cfg.seed = 808;
  const auto r = run_concentration_experiment(cfg);
  double max_excess = -INFINITY;
  for (std::size_t k = 0; k < r.curve.t.size(); ++k) {
    max_excess = std::max(max_excess, (r.curve.empirical_tail[k] - r.bernstein_bound[k]) /
                                          std::max(r.curve.mc_se[k], 1e-300));
  }
  return {r.violations == 0 && r.curve.t.size() == 20 && worst <= 1e-12,
          fmt("psi1 %.4f (s %.4f, V %.4f); %zu/%zu grid points beyond 3 SE, max excess %.2f SE; "
              "bounded-sum reduction max rel. error %.3g",
              r.psi1_norm, r.params.s, r.params.V, r.violations, r.curve.t.size(), max_excess, worst)};
}

// Plain double loop over j and l, summed far past the point where the
// telescope terms underflow.
double brute_bound(const BoundParams& bp, const std::vector<double>& barn) {
  double total = 0;
  for (int j = 0;; ++j) {
    const double mass = std::pow(2.0, -bp.q * j);
    const double scale = std::pow(2.0, bp.p * j);
    if (scale * mass < 1e-300 || j > 200000) break;
    double inner = mass * std::pow(3.0, -bp.p * bp.ell_star);
    for (int l = 0; l <= bp.ell_star; ++l) {
      inner += std::pow(3.0, -bp.p * l) * std::min(mass, std::sqrt(barn[l] * mass / bp.n));
    }
    total += scale * inner;
  }
  return default_c_pq(bp.p) * std::pow(bp.M_q, bp.p) * total;
}

// 9. General bound against brute summation, and monotonicity.
Outcome bound_cross_check() {
  RandomStream rng(909);
  double worst = 0;
  std::size_t monotone_failures = 0;
  for (int i = 0; i < 50; ++i) {
    BoundParams bp;
    bp.p = 1.0 + 2.0 * rng.uniform();
    bp.q = bp.p + 0.3 + 5.0 * rng.uniform();
    bp.M_q = 0.2 + 3.0 * rng.uniform();
    bp.ell_star = static_cast<int>(rng.below(10));
    bp.n = std::exp(rng.uniform() * std::log(1e6)) + 1.0;
    std::vector<double> barn(bp.ell_star + 1);
    double v = 1.0;
    for (auto& x : barn) x = (v *= 1.0 + 30.0 * rng.uniform());
    const auto table = [&](int l) { return barn[l]; };
    const double value = evaluate_general_bound(bp, table).value;
    const double brute = brute_bound(bp, barn);
    worst = std::max(worst, std::abs(value - brute) / brute);

    BoundParams more_n = bp, more_m = bp;
    more_n.n *= 3.0;
    more_m.M_q *= 1.5;
    const double v_n = evaluate_general_bound(more_n, table).value;
    const double v_m = evaluate_general_bound(more_m, table).value;
    const double v_b = evaluate_general_bound(bp, [&](int l) { return 4.0 * barn[l]; }).value;
    if (!(v_n <= value && v_m > value && v_b >= value)) ++monotone_failures;
  }
  return {worst <= 1e-10 && monotone_failures == 0,
          fmt("50 tuples, max rel. difference %.3g; monotonicity failures %zu", worst, monotone_failures)};
}

// 10. Entropy lower bound by hand, and a packing of the matching size.
Outcome entropy() {
  struct Point {
    double gamma, eps, hand;
  };
  // [log(1/eps)]^2 / (2 log gamma) worked out separately for each point.
  const Point points[] = {{2.0, 0.1, 3.8245110556428763},
                          {3.0, 0.01, 9.651991271472296},
                          {1.5, 0.5, 0.592471465867826}};
  double worst = 0;
  for (const auto& pt : points) {
    worst = std::max(worst, std::abs(ellipsoid_entropy_lower(pt.gamma, pt.eps) - pt.hand));
  }
  const auto rho = RhoFunctional::exponential(2.0);
  const double eps = default_lower_bound_eps(rho, 64);
  const double log_count = ellipsoid_entropy_lower(2.0, eps);
  const auto target = static_cast<std::size_t>(std::ceil(std::exp(log_count) - 1e-9));
  const auto packing = greedy_packing(rho, eps, target, 1010);
  double min_sep = INFINITY;
  for (std::size_t i = 0; i < packing.points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      min_sep = std::min(min_sep, distance(packing.points.point(i), packing.points.point(j)));
    }
  }
  const bool pass = worst <= 1e-12 && packing.target_reached && packing.points.size() >= target &&
                    min_sep >= eps;
  return {pass, fmt("hand values max error %.3g; eps_64 %.5f, target exp(%.4f) -> %zu points, packed %zu "
                    "(min separation %.5f) in %zu draws",
                    worst, eps, log_count, target, packing.points.size(), min_sep, packing.draws)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"coupling validity", coupling_validity},
      {"certificate sandwich", certificate_sandwich},
      {"euclidean rate", euclidean_rate},
      {"polynomial-decay rate", poly_rate},
      {"exponential-decay rate", exp_rate},
      {"packing lower bound", lower_bound},
      {"concentration", concentration},
      {"bound evaluator cross-check", bound_cross_check},
      {"entropy formulas", entropy},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
