#include "empot/empot.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include "empot/concentration.hpp"
#include "empot/covering.hpp"
#include "empot/error.hpp"
#include "empot/exact_ot.hpp"
#include "empot/harness.hpp"
#include "empot/hierarchical.hpp"
#include "empot/io.hpp"
#include "empot/report.hpp"
#include "empot/samplers.hpp"

struct empot_measure {
  empot::DiscreteMeasure value;
};

struct empot_plan {
  empot::CouplingPlan value;
};

struct empot_report {
  empot::Report value;
};

namespace {

thread_local std::string last_error;

empot_status to_status(empot::ErrorCode code) {
  return static_cast<empot_status>(static_cast<int>(code));
}

template <class F>
empot_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return EMPOT_OK;
  } catch (const empot::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return EMPOT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return EMPOT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return EMPOT_ERR_INTERNAL;
  }
}

void need(const void* ptr, const char* what) {
  empot::require(ptr != nullptr, std::string(what) + " must not be NULL");
}

std::string str(const char* s, const char* what) {
  need(s, what);
  return s;
}

}  // namespace

extern "C" {

const char* empot_version(void) { return "0.1.0"; }

const char* empot_last_error(void) { return last_error.c_str(); }

const char* empot_status_name(empot_status status) {
  switch (status) {
    case EMPOT_OK: return "ok";
    case EMPOT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case EMPOT_ERR_DOMAIN: return "domain";
    case EMPOT_ERR_IO: return "io";
    case EMPOT_ERR_SOLVER: return "solver";
    case EMPOT_ERR_BUDGET_EXHAUSTED: return "budget_exhausted";
    case EMPOT_ERR_CHECK_FAILED: return "check_failed";
    case EMPOT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

empot_status empot_measure_create(size_t n, size_t dim, const double* coords,
                                  const double* weights, empot_measure** out) {
  return guarded([&] {
    need(out, "out");
    need(coords, "coords");
    empot::require(n >= 1 && dim >= 1, "measure needs n >= 1 and dim >= 1");
    std::vector<double> c(coords, coords + n * dim);
    std::vector<double> w = weights ? std::vector<double>(weights, weights + n)
                                    : std::vector<double>(n, 1.0 / static_cast<double>(n));
    *out = new empot_measure{empot::DiscreteMeasure(dim, std::move(c), std::move(w))};
  });
}

empot_status empot_measure_load(const char* path, empot_measure** out) {
  return guarded([&] {
    need(out, "out");
    *out = new empot_measure{empot::load_measure(str(path, "path"))};
  });
}

empot_status empot_measure_save(const empot_measure* mu, const char* path) {
  return guarded([&] {
    need(mu, "mu");
    const std::string p = str(path, "path");
    const bool csv = p.size() >= 4 && p.compare(p.size() - 4, 4, ".csv") == 0;
    if (csv) {
      std::ostringstream out;
      out.precision(17);
      out << "weight";
      for (std::size_t k = 0; k < mu->value.dim(); ++k) out << ",x" << k;
      out << '\n';
      for (std::size_t i = 0; i < mu->value.size(); ++i) {
        out << mu->value.weight(i);
        for (double x : mu->value.point(i)) out << ',' << x;
        out << '\n';
      }
      empot::write_text_file(p, out.str());
    } else {
      empot::write_text_file(p, empot::measure_to_json(mu->value));
    }
  });
}

size_t empot_measure_size(const empot_measure* mu) { return mu ? mu->value.size() : 0; }

size_t empot_measure_dim(const empot_measure* mu) { return mu ? mu->value.dim() : 0; }

empot_status empot_measure_atom(const empot_measure* mu, size_t i, double* point, double* weight) {
  return guarded([&] {
    need(mu, "mu");
    empot::require(i < mu->value.size(), "atom index out of range");
    if (point) {
      const auto x = mu->value.point(i);
      std::copy(x.begin(), x.end(), point);
    }
    if (weight) *weight = mu->value.weight(i);
  });
}

void empot_measure_free(empot_measure* mu) { delete mu; }

empot_status empot_sample(const char* distribution, size_t n, uint64_t seed, empot_measure** out) {
  return guarded([&] {
    need(out, "out");
    empot::require(n >= 1, "n must be >= 1");
    const auto spec = empot::DistributionSpec::parse(str(distribution, "distribution"));
    *out = new empot_measure{empot::empirical_measure(spec.sample(n, seed))};
  });
}

size_t empot_plan_edges(const empot_plan* plan) { return plan ? plan->value.edges.size() : 0; }

empot_status empot_plan_edge(const empot_plan* plan, size_t k, size_t* source, size_t* target,
                             double* mass) {
  return guarded([&] {
    need(plan, "plan");
    empot::require(k < plan->value.edges.size(), "edge index out of range");
    const auto& e = plan->value.edges[k];
    if (source) *source = e.source;
    if (target) *target = e.target;
    if (mass) *mass = e.mass;
  });
}

double empot_plan_cost(const empot_plan* plan) { return plan ? plan->value.total_cost_p : 0.0; }

void empot_plan_free(empot_plan* plan) { delete plan; }

empot_status empot_wp(const empot_measure* mu, const empot_measure* nu, double p, double* distance,
                      empot_plan** plan) {
  return guarded([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(distance, "distance");
    auto result = empot::solve_wp(mu->value, nu->value, p);
    *distance = result.distance;
    if (plan) *plan = new empot_plan{std::move(result.plan)};
  });
}

empot_status empot_brute_force_wp(const empot_measure* mu, const empot_measure* nu, double p,
                                  double* distance) {
  return guarded([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(distance, "distance");
    *distance = empot::brute_force_wp(mu->value, nu->value, p);
  });
}

empot_status empot_multiscale(const empot_measure* mu, const empot_measure* nu, const char* rho,
                              const char* oracle, int ell_star, double p,
                              empot_multiscale_summary* summary, empot_plan** plan) {
  return guarded([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(summary, "summary");
    const auto r = empot::RhoFunctional::parse(str(rho, "rho"));
    const auto cover = empot::make_covering_oracle(str(oracle, "oracle"));
    empot::MultiscaleOptions opts;
    opts.build_plan = plan != nullptr;
    auto result = empot::telescope_transport(mu->value, nu->value, r, *cover, ell_star, p, opts);
    summary->plan_cost = result.plan_cost;
    summary->certified_cost = result.certified_cost;
    summary->residual_cost = result.residual_cost;
    summary->eta = result.eta;
    summary->layers = static_cast<int>(result.layers.size());
    if (plan) *plan = new empot_plan{std::move(result.plan)};
  });
}

empot_status empot_log_bar_n(const char* rho, int ell, size_t dim, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empot::log_bar_N(empot::RhoFunctional::parse(str(rho, "rho")), ell, dim);
  });
}

empot_status empot_ellipsoid_entropy_lower(double gamma, double eps, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empot::ellipsoid_entropy_lower(gamma, eps);
  });
}

empot_status empot_ellipsoid_entropy_upper(double gamma, double eps, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empot::ellipsoid_entropy_upper(gamma, eps);
  });
}

empot_status empot_projection_entropy_lower(const char* rho, double eps, size_t dim, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empot::projection_entropy_lower(empot::RhoFunctional::parse(str(rho, "rho")), eps, dim);
  });
}

empot_status empot_greedy_packing(const char* rho, double eps, size_t target, uint64_t seed,
                                  size_t budget, size_t dim, empot_measure** out, int* reached) {
  return guarded([&] {
    need(out, "out");
    auto result = empot::greedy_packing(empot::RhoFunctional::parse(str(rho, "rho")), eps, target,
                                        seed, budget, dim);
    if (reached) *reached = result.target_reached ? 1 : 0;
    empot::require(!result.points.empty(), "packing is empty");
    *out = new empot_measure{empot::empirical_measure(std::move(result.points))};
  });
}

empot_status empot_bernstein_tail(double sigma2, double M, double t, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empot::bernstein_mcdiarmid_tail(sigma2, M, t);
  });
}

empot_status empot_wasserstein_mean_tail(double s, double V, double n, double p, double t,
                                         double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empot::wasserstein_mean_tail(empot::wasserstein_bernstein_params(s, V, n, p), t);
  });
}

empot_status empot_orlicz_norm(const double* samples, size_t count, double alpha, double* out) {
  return guarded([&] {
    need(out, "out");
    need(samples, "samples");
    *out = empot::orlicz_norm(std::span<const double>(samples, count), alpha);
  });
}

empot_status empot_general_bound(double p, double q, double M_q, int ell_star, double n,
                                 const char* rho, size_t dim, int j_max, double c_pq, double* out) {
  return guarded([&] {
    need(out, "out");
    const auto r = empot::RhoFunctional::parse(str(rho, "rho"));
    empot::BoundParams params;
    params.p = p;
    params.q = q;
    params.M_q = M_q;
    params.ell_star = ell_star;
    params.n = n;
    params.j_max = j_max;
    params.c_pq = c_pq;
    *out = empot::evaluate_general_bound(params, [&](int ell) { return empot::bar_N(r, ell, dim); }).value;
  });
}

empot_status empot_euclidean_reference_rate(double p, double q, size_t d, double n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empot::euclidean_reference_rate(p, q, d, n);
  });
}

empot_status empot_run_rate(const char* config_json, empot_report** out) {
  return guarded([&] {
    need(out, "out");
    const auto cfg = empot::rate_config_from_json(str(config_json, "config"));
    *out = new empot_report{empot::make_report(empot::run_rate_experiment(cfg))};
  });
}

empot_status empot_run_lower_bound(const char* config_json, empot_report** out) {
  return guarded([&] {
    need(out, "out");
    const auto cfg = empot::lower_bound_config_from_json(str(config_json, "config"));
    *out = new empot_report{empot::make_report(empot::run_lower_bound_experiment(cfg))};
  });
}

empot_status empot_run_concentration(const char* config_json, empot_report** out) {
  return guarded([&] {
    need(out, "out");
    const auto cfg = empot::concentration_config_from_json(str(config_json, "config"));
    *out = new empot_report{empot::make_report(empot::run_concentration_experiment(cfg))};
  });
}

int empot_report_passed(const empot_report* report) { return report && report->value.passed ? 1 : 0; }

empot_status empot_report_summary(const empot_report* report, const char* key, double* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    const std::string k = str(key, "key");
    for (const auto& [name, value] : report->value.summary) {
      if (name == k) {
        *out = value;
        return;
      }
    }
    empot::fail(empot::ErrorCode::invalid_argument, "report has no summary value '" + k + "'");
  });
}

empot_status empot_report_render(const empot_report* report, const char* format, char** text) {
  return guarded([&] {
    need(report, "report");
    need(text, "text");
    const std::string s = empot::render_report(report->value, empot::parse_report_format(str(format, "format")));
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *text = buf;
  });
}

empot_status empot_report_emit(const empot_report* report, const char* dir, const char* stem,
                               const char* formats) {
  return guarded([&] {
    need(report, "report");
    std::vector<empot::ReportFormat> fmts;
    std::istringstream in(str(formats, "formats"));
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) fmts.push_back(empot::parse_report_format(item));
    }
    empot::require(!fmts.empty(), "no report formats given");
    empot::emit_report(report->value, str(dir, "dir"), str(stem, "stem"), fmts);
  });
}

void empot_report_free(empot_report* report) { delete report; }

void empot_string_free(char* text) { delete[] text; }

}  // extern "C"
