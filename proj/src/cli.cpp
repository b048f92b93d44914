#include "sinkdiv/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sinkdiv/config.hpp"
#include "sinkdiv/divergence.hpp"
#include "sinkdiv/dither.hpp"
#include "sinkdiv/errors.hpp"
#include "sinkdiv/exact_ot.hpp"

namespace sinkdiv {

namespace {

using config::Json;

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  bool allow_partial = false;
  std::optional<std::uint64_t> seed;
};

// Raised when a solver stops at max_iter and --allow-partial was not given.
class NotConverged : public Error {
 public:
  using Error::Error;
};

Json load_config(const Options& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("--config: cannot open " + opt.config_path);
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("--config: " + opt.config_path + " is not valid JSON");
  if (!doc.is_object()) throw ConfigError("--config: top level must be an object");
  for (const auto& s : opt.sets) config::apply_override(doc, s);
  return doc;
}

DiscreteMeasure load_measure(const Json& doc, const std::string& key, const BoundingBox& box) {
  const std::string path = config::get_string(config::require(doc, key, ""), key);
  try {
    DiscreteMeasure m = read_measure_file(path);
    validate(m, box);
    return m;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::optional<Cost> optional_cost(const Json& doc, const BoundingBox& box) {
  const auto it = doc.find("cost");
  if (it == doc.end()) return std::nullopt;
  return config::parse_cost(*it, box, "cost");
}

Cost required_cost(const Json& doc, const BoundingBox& box) {
  return config::parse_cost(config::require(doc, "cost", ""), box, "cost");
}

SinkhornConfig sinkhorn_section(const Json& doc) {
  const auto it = doc.find("sinkhorn");
  if (it == doc.end()) return SinkhornConfig{};
  return config::parse_sinkhorn(*it, "sinkhorn");
}

// Kernel for the discrepancy-type kinds: "kernel" if given, else K with cost = -K.
Kernel discrepancy_kernel(const Json& doc, const BoundingBox& box) {
  if (const auto it = doc.find("kernel"); it != doc.end()) {
    return config::parse_kernel(*it, box, "kernel");
  }
  if (const auto c = optional_cost(doc, box); c && c->kernel() != nullptr) return *c->kernel();
  throw ConfigError("kernel: required (or a negated_kernel cost)");
}

void emit(const Json& doc, const Json& result, std::ostream& out) {
  const std::string text = result.dump(2);
  if (const auto it = doc.find("output"); it != doc.end()) {
    const std::string path = config::get_string(*it, "output");
    write_file_atomically(path, [&](std::ostream& o) { o << text << '\n'; });
  }
  out << text << '\n';
}

void check_converged(bool converged, const Options& opt, const std::string& what) {
  if (!converged && !opt.allow_partial) {
    throw NotConverged(what + " did not converge within max_iter (use --allow-partial to accept)");
  }
}

int cmd_compute(const Options& opt, std::ostream& out) {
  const Json doc = load_config(opt);
  config::reject_unknown_keys(
      doc, {"kind", "mu", "nu", "box", "cost", "kernel", "spectral", "sinkhorn", "output"}, "");
  const std::string kind = config::get_string(config::require(doc, "kind", ""), "kind");
  const BoundingBox box = config::parse_box(config::require(doc, "box", ""), "box");
  const DiscreteMeasure mu = load_measure(doc, "mu", box);
  const DiscreteMeasure nu = load_measure(doc, "nu", box);

  Json result{{"kind", kind}};
  if (kind == "ot_exact") {
    const Cost cost = required_cost(doc, box);
    const ExactOTResult r = exact_ot(cost, mu, nu);
    result["value"] = r.value;
    result["diagnostics"] = {{"pivots", r.pivots},
                             {"max_marginal_error", r.plan.max_marginal_error(mu.weights(), nu.weights())}};
  } else if (kind == "ot_eps") {
    const Cost cost = required_cost(doc, box);
    const SinkhornConfig cfg = sinkhorn_section(doc);
    const SinkhornSolution sol = solve(cost, mu, nu, cfg);
    check_converged(sol.converged, opt, "Sinkhorn");
    result["value"] = sol.value;
    result["diagnostics"] =
        config::solver_diagnostics(sol, contraction_estimate(cost, box, cfg.epsilon).kappa);
  } else if (kind == "s_eps") {
    const Cost cost = required_cost(doc, box);
    const SinkhornConfig cfg = sinkhorn_section(doc);
    const DivergenceSolutions div = sinkhorn_divergence_detailed(cost, mu, nu, cfg);
    check_converged(div.result.converged(), opt, "Sinkhorn divergence");
    const double kappa = contraction_estimate(cost, box, cfg.epsilon).kappa;
    result["value"] = div.result.s_eps;
    result["diagnostics"] = {{"mu_nu", config::solver_diagnostics(div.mu_nu, kappa)},
                             {"mu_mu", config::solver_diagnostics(div.mu_mu, kappa)},
                             {"nu_nu", config::solver_diagnostics(div.nu_nu, kappa)}};
  } else if (kind == "discrepancy") {
    if (const auto it = doc.find("spectral"); it != doc.end()) {
      const SpectralKernel sk = config::parse_spectral(*it, "spectral");
      const DiscrepancyResult d = spectral_discrepancy(sk, mu, nu);
      result["value"] = d.value;
      result["diagnostics"] = {{"squared", d.squared}, {"method", "spectral"}};
    } else {
      const Kernel k = discrepancy_kernel(doc, box);
      const DiscrepancyResult d = discrepancy(k, mu, nu);
      result["value"] = d.value;
      result["diagnostics"] = {{"squared", d.squared}, {"kernel", k.name()}};
    }
  } else if (kind == "s_inf") {
    const Kernel k = discrepancy_kernel(doc, box);
    const Cost c = Cost::negated(k, box);
    result["value"] = s_infinity(c, mu, nu);
    result["diagnostics"] = {{"from_limits", s_infinity_from_limits(c, mu, nu)},
                             {"kernel", k.name()}};
  } else {
    throw ConfigError("kind: unknown value '" + kind +
                      "' (expected ot_exact, ot_eps, s_eps, discrepancy or s_inf)");
  }
  emit(doc, result, out);
  return kExitOk;
}

std::vector<double> sweep_grid(const Json& doc) {
  const auto e = doc.find("epsilons");
  const auto g = doc.find("grid");
  if (e != doc.end() && g != doc.end()) throw ConfigError("epsilons: give either epsilons or grid");
  if (e != doc.end()) return config::get_numbers(*e, "epsilons");
  if (g == doc.end()) return default_epsilon_grid();
  config::reject_unknown_keys(*g, {"lo", "hi", "count"}, "grid");
  const double lo = config::get_number(config::require(*g, "lo", "grid"), "grid.lo");
  const double hi = config::get_number(config::require(*g, "hi", "grid"), "grid.hi");
  const std::size_t count = config::get_count(config::require(*g, "count", "grid"), "grid.count");
  try {
    return log_spaced(lo, hi, count);
  } catch (const Error& ex) {
    throw ConfigError(std::string("grid: ") + ex.what());
  }
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const Json doc = load_config(opt);
  config::reject_unknown_keys(doc, {"mu", "nu", "box", "cost", "sinkhorn", "epsilons", "grid", "output"},
                              "");
  const BoundingBox box = config::parse_box(config::require(doc, "box", ""), "box");
  const DiscreteMeasure mu = load_measure(doc, "mu", box);
  const DiscreteMeasure nu = load_measure(doc, "nu", box);
  const Cost cost = required_cost(doc, box);
  const SinkhornConfig cfg = sinkhorn_section(doc);
  const std::string path = config::get_string(config::require(doc, "output", ""), "output");
  std::vector<double> eps;
  try {
    eps = sweep_grid(doc);
    const auto records = epsilon_sweep(cost, mu, nu, eps, cfg);
    bool converged = true;
    for (const auto& r : records) converged = converged && r.converged;
    check_converged(converged, opt, "Sweep");
    write_file_atomically(path, [&](std::ostream& o) { write_sweep_csv(o, records); });
    out << Json{{"rows", records.size()}, {"output", path}, {"converged", converged}}.dump(2) << '\n';
  } catch (const InvalidArgument& ex) {
    throw ConfigError(std::string("epsilons: ") + ex.what());
  }
  return kExitOk;
}

int cmd_dither(const Options& opt, std::ostream& out) {
  const Json doc = load_config(opt);
  config::reject_unknown_keys(doc, {"target", "box", "cost", "dither", "output", "trace"}, "");
  const BoundingBox box = config::parse_box(config::require(doc, "box", ""), "box");
  const DiscreteMeasure target = load_measure(doc, "target", box);
  // |x - y| has a cone at coincident atoms; its smoothed version is used instead.
  std::optional<Cost> cost = optional_cost(doc, box);
  if (!cost || std::holds_alternative<cost::AbsDistance>(cost->variant())) {
    cost = DitherConfig::smoothed_distance(box).cost;
  }
  DitherConfig cfg(box, *cost);
  if (const auto it = doc.find("dither"); it != doc.end()) {
    config::apply_dither_section(*it, cfg, "dither");
  }
  if (opt.seed) cfg.seed = *opt.seed;
  const std::string positions_path =
      config::get_string(config::require(doc, "output", ""), "output");
  const auto trace_it = doc.find("trace");
  const std::string trace_path =
      trace_it == doc.end() ? positions_path + ".trace.jsonl" : config::get_string(*trace_it, "trace");

  const DitherState state = dither(cfg, target);

  write_file_atomically(positions_path, [&](std::ostream& o) {
    write_measure(o, empirical_measure(state.positions));
  });
  write_file_atomically(trace_path, [&](std::ostream& o) {
    for (const auto& t : state.trace) {
      o << Json{{"iter", t.iter}, {"energy", t.energy}, {"grad_norm", t.grad_norm}, {"step", t.step}}
               .dump()
        << '\n';
    }
  });
  Json summary{{"converged", state.converged},
               {"energy", state.energy},
               {"initial_energy", state.trace.front().energy},
               {"iterations", state.trace.back().iter},
               {"line_search_failure", state.line_search_failure},
               {"inner_not_converged", state.inner_not_converged},
               {"warnings", state.warnings},
               {"output", positions_path},
               {"trace", trace_path}};
  out << summary.dump(2) << '\n';
  return kExitOk;
}

// Kernel whose witness is compared against the potentials: K with c = -K, or
// the negative distance for c = |x - y|.
std::optional<Kernel> witness_kernel(const Cost& cost, const BoundingBox& box) {
  if (const Kernel* k = cost.kernel()) return *k;
  if (std::holds_alternative<cost::AbsDistance>(cost.variant())) {
    return Kernel(kernel::NegativeDistance{}, box);
  }
  return std::nullopt;
}

int cmd_potentials(const Options& opt, std::ostream& out) {
  const Json doc = load_config(opt);
  config::reject_unknown_keys(doc, {"mu", "nu", "box", "cost", "sinkhorn", "grid", "output_dir"}, "");
  const BoundingBox box = config::parse_box(config::require(doc, "box", ""), "box");
  const DiscreteMeasure mu = load_measure(doc, "mu", box);
  const DiscreteMeasure nu = load_measure(doc, "nu", box);
  const Cost cost = required_cost(doc, box);
  SinkhornConfig cfg = sinkhorn_section(doc);
  cfg.normalize = true;
  std::size_t n = box.dim() == 1 ? 201 : 41;
  if (const auto it = doc.find("grid"); it != doc.end()) {
    config::reject_unknown_keys(*it, {"n"}, "grid");
    n = config::get_count(config::require(*it, "n", "grid"), "grid.n");
    if (n == 0) throw ConfigError("grid.n: must be positive");
  }
  const std::string dir = config::get_string(config::require(doc, "output_dir", ""), "output_dir");
  std::filesystem::create_directories(dir);

  const SinkhornSolution sol = solve(cost, mu, nu, cfg);
  check_converged(sol.converged, opt, "Sinkhorn");
  const LimitPotentials lim = ot_infinity(cost, mu, nu);
  const PointCloud grid = grid_points(box, n);
  // Extensions off the supports: phi = T_nu(psi), psi = T_mu(phi).
  const auto phi_grid = softmin(cost, nu, sol.potentials.psi, cfg.epsilon, grid);
  const auto psi_grid = softmin(cost, mu, sol.potentials.phi, cfg.epsilon, grid);
  std::vector<double> diff(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) diff[q] = phi_grid[q] - psi_grid[q];

  std::vector<std::string> files;
  auto dump = [&](const std::string& name, const PointCloud& pts, const std::vector<double>& v) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    write_file_atomically(path, [&](std::ostream& o) { write_values(o, pts, v); });
    files.push_back(path);
  };
  dump("phi.csv", mu.points(), sol.potentials.phi);
  dump("psi.csv", nu.points(), sol.potentials.psi);
  dump("phi_minus_psi.csv", grid, diff);
  dump("phi_inf.csv", mu.points(), lim.phi_inf);
  dump("psi_inf.csv", nu.points(), lim.psi_inf);

  double phi_mass = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) phi_mass += sol.potentials.phi[i] * mu.weight(i);
  Json summary{{"epsilon", cfg.epsilon},
               {"value", sol.value},
               {"ot_inf", lim.ot_inf},
               {"normalization_residual", phi_mass - 0.5 * lim.ot_inf},
               {"diagnostics", config::solver_diagnostics(
                                   sol, contraction_estimate(cost, box, cfg.epsilon).kappa)}};
  if (const auto k = witness_kernel(cost, box)) {
    const Kernel shifted = limit_kernel(*k, box);
    try {
      dump("witness.csv", grid, witness_eval(shifted, mu, nu, grid));
      dump("witness_from_limits.csv", grid, witness_from_limits(*k, mu, nu, grid, box));
      summary["witness_kernel"] = shifted.name();
    } catch (const ZeroDiscrepancy&) {
      summary["witness_kernel"] = nullptr;
    }
  }
  summary["files"] = files;
  out << summary.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal transport, Sinkhorn divergences, kernel discrepancies and dithering"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--set", opt.sets, "Override a config key, KEY=VALUE with dotted keys");
    sub->add_flag("--allow-partial", opt.allow_partial, "Report unconverged solves instead of failing");
    sub->add_option("--seed", opt.seed, "Seed for random initial positions");
  };
  CLI::App* compute = app.add_subcommand("compute", "Compute one OT, divergence or discrepancy value");
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep epsilon and write a CSV");
  CLI::App* dith = app.add_subcommand("dither", "Approximate a target by equal-weight atoms");
  CLI::App* pot = app.add_subcommand("potentials", "Dump dual potentials and witness functions");
  for (CLI::App* s : {compute, sweep, dith, pot}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (compute->parsed()) return cmd_compute(opt, out);
    if (sweep->parsed()) return cmd_sweep(opt, out);
    if (dith->parsed()) return cmd_dither(opt, out);
    return cmd_potentials(opt, out);
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace sinkdiv
