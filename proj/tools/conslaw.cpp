// conslaw: numerical laboratory for the flux-nonlinearity index, high
// frequency oscillating entropy solutions, and fractional Sobolev
// scaling of scalar conservation laws.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "conslaw/experiment.hpp"

using namespace conslaw;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string formats;
  int threads = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.formats, "comma-separated subset of json,csv,svg");
  cmd->add_option("--threads", f.threads, "worker threads for sweeps");
  cmd->add_option("--seed", f.seed, "seed for sampled directions / Monte-Carlo")
      ->each([&](const std::string&) { f.have_seed = true; });
}

ExperimentConfig load_base_config(const CommonFlags& f, const std::string& kind) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw config_error("cannot open config file '" + f.config_path + "'");
    json j = json::parse(in);
    c = config_from_json(j);
  }
  c.kind = kind;
  if (!f.out.empty()) c.out = f.out;
  if (f.threads > 0) c.threads = f.threads;
  if (f.have_seed) c.seed = f.seed;
  if (!f.formats.empty()) {
    c.formats.clear();
    std::stringstream ss(f.formats);
    std::string tok;
    while (std::getline(ss, tok, ',')) c.formats.push_back(tok);
  }
  return c;
}

int execute(const ExperimentConfig& c) {
  RunRecord r = run_experiment(c);
  auto files = write_outputs(r);
  for (const auto& v : r.verdicts)
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", v.name.c_str(), v.detail.c_str());
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  return r.all_pass() ? kExitOk : kExitVerdictFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conslaw: flux nonlinearity, oscillating waves, Sobolev scaling"};
  app.require_subcommand(1);

  struct {
    CommonFlags common;
    std::string catalog, spec, u0, norm, solver;
    int dim = 0;
    double M = 0, ubar = 1e300, gamma = 0, s = 0, p = 0, A = 0, t_eval = 1e300, t_frac = 0,
           cfl = 0, delta_min = 0, delta_max = 0;
    int delta_count = 0, grid = 0, cells = 0, kmax = -1;
    long samples = 0;
    std::vector<double> v, eps_list, s_factors, output_times;
  } o;

  auto add_flux = [&](CLI::App* cmd) {
    cmd->add_option("--catalog", o.catalog, "catalog flux key");
    cmd->add_option("--dim", o.dim, "dimension for d-parametrized catalog families");
    cmd->add_option("--flux", o.spec, "flux spec, e.g. \"[u^2/2, u^3/3]\"");
    cmd->add_option("--M", o.M, "state interval half-width");
  };
  auto add_wave = [&](CLI::App* cmd) {
    cmd->add_option("--ubar", o.ubar, "ground state");
    cmd->add_option("--v", o.v, "phase direction")->expected(-1);
    cmd->add_option("--gamma", o.gamma, "frequency exponent (> 1)");
    cmd->add_option("--u0", o.u0, "initial profile expression in u on [0,1)");
    cmd->add_option("--eps", o.eps_list, "decreasing epsilon list")->expected(-1);
  };

  auto* analyze = app.add_subcommand("analyze-flux", "nonlinearity index and classifications");
  add_flux(analyze);
  analyze->add_option("--kmax", o.kmax, "max derivative order probed");
  add_common(analyze, o.common);

  auto* fitalpha = app.add_subcommand("fit-alpha", "empirical degeneracy exponent");
  add_flux(fitalpha);
  fitalpha->add_option("--delta-min", o.delta_min);
  fitalpha->add_option("--delta-max", o.delta_max);
  fitalpha->add_option("--delta-count", o.delta_count);
  fitalpha->add_option("--samples", o.samples, "midpoint cells per measure");
  add_common(fitalpha, o.common);

  auto* profile = app.add_subcommand("profile", "1-D reduced profile solver");
  add_flux(profile);
  add_wave(profile);
  profile->add_option("--solver", o.solver, "characteristics | fv");
  profile->add_option("--cells", o.cells);
  profile->add_option("--cfl", o.cfl);
  profile->add_option("--times", o.output_times, "output times")->expected(-1);
  add_common(profile, o.common);

  auto* wkb = app.add_subcommand("wkb-sweep", "geometric-optics error scaling");
  add_flux(wkb);
  add_wave(wkb);
  wkb->add_option("--t-frac", o.t_frac, "evaluation time / uniform pre-shock time");
  wkb->add_option("--norm", o.norm, "sup | c1");
  wkb->add_option("--grid", o.grid);
  add_common(wkb, o.common);

  auto* cancel = app.add_subcommand("cancellation", "oscillation cancellation sweep");
  add_flux(cancel);
  add_wave(cancel);
  cancel->add_option("--t-eval", o.t_eval, "evaluation time");
  cancel->add_option("--cells", o.cells);
  cancel->add_option("--cfl", o.cfl);
  add_common(cancel, o.common);

  auto* sob = app.add_subcommand("sobolev-scaling", "fractional seminorm scaling sweep");
  sob->add_option("--u0", o.u0, "base profile expression");
  sob->add_option("--gamma", o.gamma);
  sob->add_option("--s", o.s);
  sob->add_option("--p", o.p);
  sob->add_option("--A", o.A, "box half-width");
  sob->add_option("--eps", o.eps_list)->expected(-1);
  sob->add_option("--grid", o.grid, "base profile samples");
  add_common(sob, o.common);

  auto* smooth = app.add_subcommand("smoothing-bound", "maximal smoothing dichotomy");
  add_flux(smooth);
  smooth->add_option("--eps", o.eps_list)->expected(-1);
  smooth->add_option("--t-frac", o.t_frac);
  smooth->add_option("--s-factors", o.s_factors, "multiples of alpha_sup to probe")->expected(-1);
  smooth->add_option("--p", o.p);
  smooth->add_option("--grid", o.grid);
  add_common(smooth, o.common);

  auto* cat = app.add_subcommand("catalog", "list built-in fluxes with annotations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cat->parsed()) {
      std::fputs(catalog_listing().c_str(), stdout);
      return kExitOk;
    }
    std::string kind;
    for (auto* sub : {analyze, fitalpha, profile, wkb, cancel, sob, smooth})
      if (sub->parsed()) kind = sub->get_name();
    ExperimentConfig c = load_base_config(o.common, kind);

    if (!o.catalog.empty()) {
      c.catalog = o.catalog;
      c.flux_spec.clear();
    }
    if (!o.spec.empty()) {
      c.flux_spec = o.spec;
      c.catalog.clear();
    }
    if (o.dim > 0) c.dim = o.dim;
    if (o.M > 0) c.M = o.M;
    if (o.ubar != 1e300) c.ubar = o.ubar;
    if (!o.v.empty()) c.v = o.v;
    if (o.gamma > 0) c.gamma = o.gamma;
    if (!o.u0.empty()) c.u0 = o.u0;
    if (!o.eps_list.empty()) c.eps_list = o.eps_list;
    if (o.s > 0) c.s = o.s;
    if (o.p > 0) c.p = o.p;
    if (o.A > 0) c.A = o.A;
    if (!o.s_factors.empty()) c.s_factors = o.s_factors;
    if (o.delta_min > 0) c.delta_min = o.delta_min;
    if (o.delta_max > 0) c.delta_max = o.delta_max;
    if (o.delta_count > 0) c.delta_count = o.delta_count;
    if (o.samples > 0) c.samples = o.samples;
    if (o.t_eval != 1e300) c.t_eval = o.t_eval;
    if (o.t_frac > 0) c.t_frac = o.t_frac;
    if (o.grid > 0) c.grid = o.grid;
    if (o.cells > 0) c.cells = o.cells;
    if (o.cfl > 0) c.cfl = o.cfl;
    if (o.kmax >= 0) c.kmax = o.kmax;
    if (!o.output_times.empty()) c.output_times = o.output_times;
    if (!o.norm.empty()) c.norm = o.norm;
    if (!o.solver.empty()) c.solver = o.solver;

    return execute(c);
  } catch (const parse_error& e) {
    std::fprintf(stderr, "flux spec error: %s\n", e.what());
    return kExitUsage;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  }
}
