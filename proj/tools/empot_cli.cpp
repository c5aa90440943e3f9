// Command-line front end over the C API.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "empot/empot.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

struct Failure {
  std::string message;
};

void check(empot_status status, const std::string& context) {
  if (status != EMPOT_OK) {
    throw Failure{context + ": " + empot_status_name(status) + ": " + empot_last_error()};
  }
}

struct Measure {
  empot_measure* ptr = nullptr;
  ~Measure() { empot_measure_free(ptr); }
};

struct Plan {
  empot_plan* ptr = nullptr;
  ~Plan() { empot_plan_free(ptr); }
};

struct ReportHandle {
  empot_report* ptr = nullptr;
  ~ReportHandle() { empot_report_free(ptr); }
};

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

std::string in_out_dir(const Globals& g, const std::string& file) {
  const std::filesystem::path p(file);
  if (p.is_absolute()) return file;
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / p).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{"cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_config(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw Failure{"malformed config '" + path + "': " + e.what()};
  }
}

// Explicit --seed / --threads win over the config file.
void apply_globals(const Globals& g, json& cfg) {
  if (g.seed_opt->count() > 0 || !cfg.contains("seed")) cfg["seed"] = g.seed;
  if (g.threads_opt->count() > 0 || !cfg.contains("threads")) cfg["threads"] = g.threads;
}

double summary(const ReportHandle& r, const char* key) {
  double v = 0;
  check(empot_report_summary(r.ptr, key, &v), std::string("summary ") + key);
  return v;
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical optimal transport: exact and multiscale W_p, entropy bounds, rate experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed");
  g.threads_opt = app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for output files");

  std::string mu_path, nu_path, plan_path, rho = "euclidean", oracle = "greedy", dist, out, config,
              model = "power", mode = "reference", n_grid_text, scores;
  double p = 1.0, eps = 0.0, time_limit = 0.0, lsi_c = 1.0;
  int levels = 3;
  std::size_t n = 0, reps = 0, dim = 0, packing = 0, grid = 20;
  bool exact = false, certify = false;

  auto* wp = app.add_subcommand("wp", "Exact W_p between two measure files");
  wp->add_option("--mu", mu_path, "First measure (.json or .csv)")->required();
  wp->add_option("--nu", nu_path, "Second measure")->required();
  wp->add_option("--p", p, "Order p >= 1");
  wp->add_option("--plan", plan_path, "Write the optimal plan as CSV");

  auto* ms = app.add_subcommand("multiscale", "Multiscale coupling with certified cost");
  ms->add_option("--mu", mu_path)->required();
  ms->add_option("--nu,--nuhat", nu_path)->required();
  ms->add_option("--p", p);
  ms->add_option("--rho", rho, "euclidean | poly:b=.. | exp:gamma=..");
  ms->add_option("--oracle", oracle, "greedy | grid");
  ms->add_option("--levels,--depth", levels, "Partition depth l*");
  ms->add_flag("--exact", exact, "Also solve exactly and check exact <= plan <= certified");

  auto* ent = app.add_subcommand("entropy", "Covering-number bounds and greedy packings");
  ent->add_option("--rho", rho);
  ent->add_option("--dim", dim, "Dimension for the Euclidean gauge");
  ent->add_option("--eps", eps, "Resolution for entropy bounds");
  ent->add_option("--levels", levels, "Print log barN(l) for l = 0..levels");
  ent->add_option("--packing", packing, "Target size of a greedy eps-packing");

  auto* smp = app.add_subcommand("sample", "Draw an empirical measure");
  smp->add_option("--dist,--class", dist, "uniform:d=4 | gaussian:d=4 | heavy:d=3,q=4 | poly:b0=1 | exp:gamma0=2")->required();
  smp->add_option("--scores", scores, "Score law for poly/exp classes: gaussian | uniform | laplace");
  smp->add_option("--n", n)->required();
  smp->add_option("--out", out, "Output .csv or .json")->required();

  auto* conc = app.add_subcommand("concentration", "Deviation tail of W_p against the Bernstein bound");
  conc->add_option("--config", config, "JSON config");
  conc->add_option("--dist", dist);
  conc->add_option("--n", n);
  conc->add_option("--reps", reps);
  conc->add_option("--p", p);
  conc->add_option("--grid", grid, "Number of t grid points");
  conc->add_option("--lsi-c", lsi_c, "Log-Sobolev constant");
  conc->add_option("--out", out, "CSV output file (default concentration.csv)");

  auto* rate = app.add_subcommand("rate", "Monte Carlo rate experiment with fit");
  rate->add_option("--config", config, "JSON config");
  rate->add_option("--dist", dist);
  rate->add_option("--p", p);
  rate->add_option("--n-grid", n_grid_text, "Comma-separated sample sizes");
  rate->add_option("--reps", reps);
  rate->add_option("--model", model, "power | polylog | subpoly");
  rate->add_option("--mode", mode, "reference | two_sample");
  rate->add_option("--time-limit", time_limit, "Seconds per sample size");
  rate->add_flag("--certify", certify, "Check multiscale certificates against exact values");

  auto* lb = app.add_subcommand("lowerbound", "Packing lower-bound experiment");
  lb->add_option("--config", config, "JSON config");
  std::string lb_rho = "exp:gamma=2";
  lb->add_option("--rho", lb_rho);
  lb->add_option("--dim", dim);
  lb->add_option("--n", n);
  lb->add_option("--reps", reps);
  lb->add_option("--p", p);
  lb->add_option("--eps", eps, "Separation (default from rho and n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (wp->parsed()) {
      Measure mu, nu;
      Plan plan;
      check(empot_measure_load(mu_path.c_str(), &mu.ptr), "load mu");
      check(empot_measure_load(nu_path.c_str(), &nu.ptr), "load nu");
      double d = 0;
      check(empot_wp(mu.ptr, nu.ptr, p, &d, plan_path.empty() ? nullptr : &plan.ptr), "wp");
      std::printf("W_p = %.12g\n", d);
      if (!plan_path.empty()) {
        std::ofstream f(in_out_dir(g, plan_path));
        f.precision(17);
        f << "source,target,mass\n";
        for (std::size_t k = 0; k < empot_plan_edges(plan.ptr); ++k) {
          std::size_t s = 0, t = 0;
          double m = 0;
          check(empot_plan_edge(plan.ptr, k, &s, &t, &m), "plan edge");
          f << s << ',' << t << ',' << m << '\n';
        }
        if (!f) throw Failure{"cannot write plan '" + plan_path + "'"};
      }
      return kExitOk;
    }

    if (ms->parsed()) {
      Measure mu, nu;
      check(empot_measure_load(mu_path.c_str(), &mu.ptr), "load mu");
      check(empot_measure_load(nu_path.c_str(), &nu.ptr), "load nu");
      empot_multiscale_summary s{};
      check(empot_multiscale(mu.ptr, nu.ptr, rho.c_str(), oracle.c_str(), levels, p, &s, nullptr),
            "multiscale");
      std::printf("plan cost      %.12g\ncertified cost %.12g\nlayers         %d\neta            %.12g\n",
                  s.plan_cost, s.certified_cost, s.layers, s.eta);
      if (exact) {
        double d = 0;
        check(empot_wp(mu.ptr, nu.ptr, p, &d, nullptr), "wp");
        const double exact_cost = std::pow(d, p);
        std::printf("exact cost     %.12g\n", exact_cost);
        const bool ok = exact_cost <= s.plan_cost * (1 + 1e-9) + 1e-12 &&
                        s.plan_cost <= s.certified_cost * (1 + 1e-9) + 1e-12;
        std::printf("sandwich       %s\n", ok ? "ok" : "VIOLATED");
        return ok ? kExitOk : kExitCheckFailed;
      }
      return kExitOk;
    }

    if (ent->parsed()) {
      for (int l = 0; l <= levels; ++l) {
        double v = 0;
        check(empot_log_bar_n(rho.c_str(), l, dim, &v), "log barN");
        std::printf("log barN(%d) = %.12g\n", l, v);
      }
      if (eps > 0) {
        double v = 0;
        check(empot_projection_entropy_lower(rho.c_str(), eps, dim, &v), "projection bound");
        std::printf("projection lower bound at eps=%g: %.12g\n", eps, v);
        if (rho.rfind("exp:", 0) == 0) {
          const double gamma = std::stod(rho.substr(rho.find("gamma=") + 6));
          check(empot_ellipsoid_entropy_lower(gamma, eps, &v), "entropy lower");
          std::printf("ellipsoid lower bound: %.12g\n", v);
          check(empot_ellipsoid_entropy_upper(gamma, eps, &v), "entropy upper");
          std::printf("ellipsoid upper bound: %.12g\n", v);
        }
      }
      if (packing > 0) {
        if (!(eps > 0)) throw Failure{"--packing needs --eps"};
        Measure pack;
        int reached = 0;
        check(empot_greedy_packing(rho.c_str(), eps, packing, g.seed, 1000000, dim, &pack.ptr, &reached),
              "packing");
        std::printf("packing: %zu points in dimension %zu (%s)\n", empot_measure_size(pack.ptr),
                    empot_measure_dim(pack.ptr), reached ? "target reached" : "budget exhausted");
        return reached ? kExitOk : kExitCheckFailed;
      }
      return kExitOk;
    }

    if (smp->parsed()) {
      Measure m;
      if (!scores.empty()) dist += ",scores=" + scores;
      check(empot_sample(dist.c_str(), n, g.seed, &m.ptr), "sample");
      const std::string path = in_out_dir(g, out);
      check(empot_measure_save(m.ptr, path.c_str()), "save");
      std::printf("wrote %zu points to %s\n", n, path.c_str());
      return kExitOk;
    }

    if (conc->parsed()) {
      json cfg = config.empty() ? json::object() : load_config(config);
      if (!dist.empty()) cfg["distribution"] = dist;
      if (n > 0) cfg["n"] = n;
      if (reps > 0) cfg["reps"] = reps;
      if (conc->count("--p") > 0) cfg["p"] = p;
      if (conc->count("--grid") > 0) cfg["grid_points"] = grid;
      if (conc->count("--lsi-c") > 0) cfg["C_lsi"] = lsi_c;
      apply_globals(g, cfg);
      ReportHandle r;
      check(empot_run_concentration(cfg.dump().c_str(), &r.ptr), "concentration");
      const std::string path = in_out_dir(g, out.empty() ? "concentration.csv" : out);
      const std::filesystem::path fp(path);
      check(empot_report_emit(r.ptr, fp.parent_path().string().c_str(), fp.stem().string().c_str(), "csv,json,svg"),
            "write report");
      std::printf("psi1 norm %.6g, mean W_p %.6g, grid violations %g\n", summary(r, "psi1_norm"),
                  summary(r, "mean_distance"), summary(r, "violations"));
      return empot_report_passed(r.ptr) ? kExitOk : kExitCheckFailed;
    }

    if (rate->parsed()) {
      json cfg = config.empty() ? json::object() : load_config(config);
      if (!dist.empty()) cfg["distribution"] = dist;
      if (rate->count("--p") > 0) cfg["p"] = p;
      if (!n_grid_text.empty()) cfg["n_grid"] = parse_grid(n_grid_text);
      if (reps > 0) cfg["reps"] = reps;
      if (rate->count("--model") > 0 || !cfg.contains("rate_model")) cfg["rate_model"] = model;
      if (rate->count("--mode") > 0 || !cfg.contains("mode")) cfg["mode"] = mode;
      if (time_limit > 0) cfg["cell_time_limit"] = time_limit;
      if (certify) cfg["certificate_check"] = true;
      apply_globals(g, cfg);
      ReportHandle r;
      check(empot_run_rate(cfg.dump().c_str(), &r.ptr), "rate");
      check(empot_report_emit(r.ptr, g.out_dir.c_str(), "rate", "csv,json,svg"), "write report");
      std::printf("slope %.4f +- %.4f (reference %.4f), chi2 %.3g on %g dof\n", summary(r, "slope"),
                  summary(r, "slope_se"), summary(r, "reference_slope"), summary(r, "chi2"),
                  summary(r, "dof"));
      return empot_report_passed(r.ptr) ? kExitOk : kExitCheckFailed;
    }

    if (lb->parsed()) {
      json cfg = config.empty() ? json::object() : load_config(config);
      if (lb->count("--rho") > 0 || !cfg.contains("rho")) cfg["rho"] = lb_rho;
      if (dim > 0) cfg["euclidean_dim"] = dim;
      if (n > 0) cfg["n"] = n;
      if (reps > 0) cfg["reps"] = reps;
      if (lb->count("--p") > 0) cfg["p"] = p;
      if (eps > 0) cfg["eps_n"] = eps;
      apply_globals(g, cfg);
      ReportHandle r;
      check(empot_run_lower_bound(cfg.dump().c_str(), &r.ptr), "lowerbound");
      check(empot_report_emit(r.ptr, g.out_dir.c_str(), "lowerbound", "csv,json,svg"), "write report");
      std::printf("eps_n %.6g, mean kappa %.4f +- %.4f, mean W_p %.6g, violations %g\n",
                  summary(r, "eps_n"), summary(r, "mean_kappa"), summary(r, "kappa_se"),
                  summary(r, "mean_wp"), summary(r, "violations"));
      return empot_report_passed(r.ptr) ? kExitOk : kExitCheckFailed;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
