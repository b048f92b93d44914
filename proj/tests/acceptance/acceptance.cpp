// Acceptance suite: one [PASS]/[FAIL] line per criterion. Pass criterion
// numbers as arguments to run a subset; exits nonzero if any selected
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "sinkdiv/discrepancy.hpp"
#include "sinkdiv/divergence.hpp"
#include "sinkdiv/dither.hpp"
#include "sinkdiv/exact_ot.hpp"
#include "sinkdiv/kernels.hpp"
#include "sinkdiv/measures.hpp"
#include "sinkdiv/sinkhorn.hpp"

using namespace sinkdiv;
using sinkdiv::testing::line_measure;
using sinkdiv::testing::random_measure;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "; failed: ";
      else detail << ", ";
      detail << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << x;
  return s.str();
}

SinkhornConfig tight(double eps) {
  SinkhornConfig cfg;
  cfg.epsilon = eps;
  cfg.tol = 1e-12;
  cfg.max_iter = 2'000'000;
  return cfg;
}

// Three 1D toys: the four-atom instance, two interleaved uniforms, and an
// asymmetric pair.
struct Toy {
  std::string name;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

std::vector<Toy> toys() {
  return {{"four-atom", sinkdiv::testing::toy_mu(), sinkdiv::testing::toy_nu()},
          {"interleaved", line_measure({0.0, 0.5}, {1, 1}), line_measure({0.25, 0.75}, {1, 1})},
          {"asymmetric", line_measure({0.2, 0.6}, {0.3, 0.7}),
           line_measure({0.0, 0.5, 1.0}, {0.5, 0.25, 0.25})}};
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto mu = sinkdiv::testing::toy_mu();
  const auto nu = sinkdiv::testing::toy_nu();
  const BoundingBox box = sinkdiv::testing::unit_interval();
  const Cost c(cost::AbsDistance{}, box);
  const double exact = exact_ot(c, mu, nu).value;
  const double w1 = wasserstein1_1d(mu, nu);
  const SinkhornSolution s = solve(c, mu, nu, tight(1e-4));
  const double t = seconds_since(t0);
  o.detail << "exact_ot=" << std::setprecision(17) << exact << " w1=" << w1
           << " OT_eps(1e-4)=" << s.value << " time=" << std::setprecision(3) << t << "s";
  o.require(std::abs(exact - 0.1) <= 1e-12, "exact_ot != 0.1");
  o.require(std::abs(w1 - 0.1) <= 1e-12, "wasserstein1_1d != 0.1");
  o.require(s.converged && std::abs(s.value - 0.1) <= 5e-3, "Sinkhorn not within 5e-3");
  o.require(t < 1.0, "runtime >= 1 s");
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  const BoundingBox line({0.0}, {1.0});
  const BoundingBox square({0.0, 0.0}, {1.0, 1.0});
  struct Instance {
    BoundingBox box;
    Cost cost;
  };
  const std::vector<Instance> instances = {
      {line, Cost(cost::AbsDistance{}, line)},
      {square, Cost(cost::AbsDistance{}, square)},
      {square, Cost(cost::PowerDistance{2.0}, square)},
  };
  const auto grid = default_epsilon_grid();
  double worst_drop = 0.0;
  std::size_t unconverged = 0;
  std::size_t max_iter = 0;
  for (const auto& inst : instances) {
    const auto mu = random_measure(rng, inst.box, 20);
    const auto nu = random_measure(rng, inst.box, 20);
    double prev = -INFINITY;
    for (double eps : grid) {
      SinkhornConfig cfg = tight(eps);
      cfg.tol = 1e-11;
      const SinkhornSolution s = solve(inst.cost, mu, nu, cfg);
      if (!s.converged) ++unconverged;
      max_iter = std::max(max_iter, s.iterations);
      worst_drop = std::max(worst_drop, prev - s.value);
      prev = s.value;
    }
  }
  const double t = seconds_since(t0);
  o.detail << "worst decrease=" << sci(worst_drop) << " unconverged=" << unconverged
           << " max iterations=" << max_iter << " time=" << std::setprecision(3) << t << "s";
  o.require(worst_drop <= 1e-8, "OT_eps decreased by more than 1e-8");
  o.require(unconverged == 0, "unconverged solves");
  o.require(t < 30.0, "runtime >= 30 s");
  return o;
}

Outcome criterion_3() {
  Outcome o;
  const BoundingBox box = sinkdiv::testing::unit_interval();
  const Cost c(cost::AbsDistance{}, box);
  const auto grid = default_epsilon_grid();
  double worst_value = 0.0;
  double worst_phi = 0.0;
  bool monotone = true;
  for (const auto& toy : toys()) {
    const LimitPotentials lim = ot_infinity(c, toy.mu, toy.nu);
    const SinkhornSolution big = solve(c, toy.mu, toy.nu, tight(1024.0));
    worst_value = std::max(worst_value, std::abs(big.value - lim.ot_inf));
    worst_phi = std::max(worst_phi, sup_diff(big.potentials.phi, lim.phi_inf));
    double prev_value = INFINITY;
    double prev_phi = INFINITY;
    for (std::size_t t = grid.size() / 2; t < grid.size(); ++t) {
      const SinkhornSolution s = solve(c, toy.mu, toy.nu, tight(grid[t]));
      const double dv = std::abs(s.value - lim.ot_inf);
      const double dp = sup_diff(s.potentials.phi, lim.phi_inf);
      // On the symmetric toys phi_eps = phi_inf exactly; there the distance is
      // solver noise (~1e-13 at tol 1e-12), so increases below 1e-11 are ignored.
      // The asymmetric toy has a genuine distance and must decrease strictly.
      const double slack = toy.name == "asymmetric" ? 0.0 : 1e-11;
      if (!(dv < prev_value) || dp > prev_phi + slack) monotone = false;
      if (toy.name == "asymmetric" && !(dp < prev_phi)) monotone = false;
      prev_value = dv;
      prev_phi = dp;
    }
  }
  o.detail << "|OT_1024-OT_inf|=" << sci(worst_value) << " sup|phi_1024-phi_inf|=" << sci(worst_phi)
           << " decreasing over upper grid=" << (monotone ? "yes" : "no");
  o.require(worst_value <= 1e-3, "value gap > 1e-3");
  o.require(worst_phi <= 1e-3, "potential gap > 1e-3");
  o.require(monotone, "distances not decreasing");
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const BoundingBox box = sinkdiv::testing::unit_interval();
  const Cost c(cost::AbsDistance{}, box);
  const auto grid = default_epsilon_grid();
  double lo = INFINITY;
  double hi = -INFINITY;
  bool monotone = true;
  for (const auto& toy : toys()) {
    const double exact = exact_ot(c, toy.mu, toy.nu).value;
    double prev = -INFINITY;
    for (double eps : grid) {
      const SinkhornSolution s = solve(c, toy.mu, toy.nu, tight(eps));
      const double gap = s.value - exact;
      if (eps == grid.front()) {
        lo = std::min(lo, gap);
        hi = std::max(hi, gap);
      }
      if (gap < prev - 1e-12) monotone = false;
      prev = gap;
    }
  }
  o.detail << "OT_1e-4 - OT in [" << sci(lo) << ", " << sci(hi)
           << "] gap increasing in eps=" << (monotone ? "yes" : "no");
  o.require(lo >= -1e-9 && hi <= 1e-3, "gap outside [-1e-9, 1e-3]");
  o.require(monotone, "gap not decreasing as eps decreases");
  return o;
}

Outcome criterion_5() {
  Outcome o;
  std::mt19937_64 rng(51);
  const BoundingBox box({0.0, 0.0}, {1.0, 1.0});
  const Kernel gauss(kernel::Gaussian{0.5}, box);
  const Kernel shifted = make_cpd_shifted(Kernel(kernel::NegativeDistance{}, box), box.lower(), box);
  double worst_eps = 0.0;
  double worst_alg = 0.0;
  bool converged = true;
  for (const Kernel* k : {&gauss, &shifted}) {
    const Cost c = Cost::negated(*k, box);
    for (int r = 0; r < 10; ++r) {
      const auto mu = random_measure(rng, box, 10);
      const auto nu = random_measure(rng, box, 10);
      const double half_d2 = 0.5 * discrepancy(*k, mu, nu).squared;
      const DivergenceResult div = sinkhorn_divergence(c, mu, nu, tight(1e3));
      converged = converged && div.converged();
      worst_eps = std::max(worst_eps, std::abs(div.s_eps - half_d2));
      worst_alg = std::max(worst_alg, std::abs(half_d2 - s_infinity_from_limits(c, mu, nu)));
    }
  }
  o.detail << "|S_1e3 - D^2/2|=" << sci(worst_eps) << " |D^2/2 - OT_inf combination|=" << sci(worst_alg);
  o.require(worst_eps <= 2e-3, "S_eps not within 2e-3");
  o.require(worst_alg <= 1e-12, "algebraic identity off by > 1e-12");
  o.require(converged, "unconverged solves");
  return o;
}

Outcome criterion_6() {
  Outcome o;
  std::mt19937_64 rng(66);
  const BoundingBox box({0.0, 0.0}, {1.0, 1.0});
  const Kernel k(kernel::NegativeDistance{}, box);
  const Kernel k_plus_c(kernel::ShiftedNegativeDistance{default_distance_shift(box)}, box);
  const Kernel k_tilde = make_cpd_shifted(k, box.lower(), box);
  const Kernel g(kernel::Gaussian{0.5}, box);
  const KernelFunction g_plus_c = [&g](ConstPoint x, ConstPoint y) { return g(x, y) + 3.0; };
  const Kernel g_tilde = make_cpd_shifted(g, box.lower(), box);
  const PointCloud queries = grid_points(box, 10);

  double worst_d = 0.0;
  double worst_w_shift = 0.0;   // K vs K + C
  double worst_w_tilde = 0.0;   // K~ vs the formula through K
  double worst_w_limits = 0.0;  // limit potentials vs witness_eval
  double worst_w_const = 0.0;   // K vs K~ up to one constant
  std::uniform_int_distribution<std::size_t> size(1, 12);
  for (int r = 0; r < 100; ++r) {
    const auto mu = random_measure(rng, box, size(rng));
    const auto nu = random_measure(rng, box, size(rng));
    const double dk = discrepancy(k, mu, nu).value;
    worst_d = std::max({worst_d, std::abs(dk - discrepancy(k_plus_c, mu, nu).value),
                        std::abs(dk - discrepancy(k_tilde, mu, nu).value)});
    const double dg = discrepancy(g, mu, nu).value;
    worst_d = std::max({worst_d, std::abs(dg - discrepancy(g_plus_c, mu, nu).value),
                        std::abs(dg - discrepancy(g_tilde, mu, nu).value)});

    const auto w = witness_eval(k, mu, nu, queries);
    const auto w_c = witness_eval(k_plus_c, mu, nu, queries);
    const auto w_t = witness_eval(k_tilde, mu, nu, queries);
    const auto w_formula = cpd_witness_from_base(k, box.lower(), mu, nu, queries);
    const auto w_lim = witness_from_limits(k, mu, nu, queries, box);
    worst_w_shift = std::max(worst_w_shift, sup_diff(w, w_c));
    worst_w_tilde = std::max(worst_w_tilde, sup_diff(w_t, w_formula));
    worst_w_limits = std::max(worst_w_limits, sup_diff(w_lim, w_t));
    const double offset = w_t[0] - w[0];
    for (std::size_t q = 0; q < w.size(); ++q) {
      worst_w_const = std::max(worst_w_const, std::abs(w_t[q] - w[q] - offset));
    }
  }
  o.detail << "D spread=" << sci(worst_d) << " witness K vs K+C=" << sci(worst_w_shift)
           << " K~ vs formula=" << sci(worst_w_tilde) << " limits vs K~=" << sci(worst_w_limits)
           << " K vs K~ mod const=" << sci(worst_w_const);
  o.require(worst_d <= 1e-10, "discrepancies differ");
  o.require(worst_w_shift <= 1e-9, "K and K+C witnesses differ");
  o.require(worst_w_tilde <= 1e-9, "K~ witness differs from the formula");
  o.require(worst_w_limits <= 1e-9, "limit-potential witness differs");
  o.require(worst_w_const <= 1e-9, "K and K~ witnesses differ by more than a constant");
  return o;
}

Outcome criterion_7() {
  Outcome o;
  std::mt19937_64 rng(77);
  const BoundingBox torus({0.0}, {1.0});
  std::uniform_real_distribution<double> coef(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, 10);
  double worst = 0.0;
  for (int r = 0; r < 50; ++r) {
    std::vector<double> alpha(9);
    for (double& a : alpha) a = coef(rng);
    const SpectralKernel sk(alpha);
    const auto mu = random_measure(rng, torus, size(rng));
    const auto nu = random_measure(rng, torus, size(rng));
    const double spectral = spectral_discrepancy(sk, mu, nu).squared;
    const double gram = discrepancy(KernelFunction(sk), mu, nu).squared;
    worst = std::max(worst, std::abs(spectral - gram));
  }
  const SpectralKernel hand({1.0, 1.0});
  const auto a = DiscreteMeasure::dirac({0.0});
  const auto b = DiscreteMeasure::dirac({0.5});
  const double hand_spectral = spectral_discrepancy(hand, a, b).squared;
  const KernelFunction explicit_kernel = [](ConstPoint x, ConstPoint y) {
    return 1.0 + 2.0 * std::cos(2.0 * M_PI * (x[0] - y[0]));
  };
  const double hand_gram = discrepancy(explicit_kernel, a, b).squared;
  o.detail << "max |spectral - Gram|=" << sci(worst) << " hand: spectral=" << hand_spectral
           << " Gram=" << hand_gram;
  o.require(worst <= 1e-10, "spectral and Gram forms differ");
  o.require(std::abs(hand_spectral - 8.0) <= 1e-10 && std::abs(hand_gram - 8.0) <= 1e-10,
            "hand instance != 8");
  return o;
}

Outcome criterion_8() {
  Outcome o;
  std::mt19937_64 rng(88);
  const BoundingBox line({0.0}, {1.0});
  const BoundingBox square({0.0, 0.0}, {1.0, 1.0});
  double worst_marginal = 0.0;
  double worst_gap = 0.0;
  double worst_excess = -INFINITY;
  std::size_t runs = 0;
  std::size_t ratios_checked = 0;
  for (const BoundingBox* box : {&line, &square}) {
    const Kernel g(kernel::Gaussian{0.5}, *box);
    const std::vector<Cost> costs = {Cost(cost::AbsDistance{}, *box), Cost::negated(g, *box),
                                     Cost(cost::PowerDistance{2.0}, *box)};
    for (const Cost& c : costs) {
      for (int r = 0; r < 3; ++r) {
        const auto mu = random_measure(rng, *box, 15);
        const auto nu = random_measure(rng, *box, 12);
        for (double eps : {0.05, 0.3, 1.0, 5.0, 25.0}) {
          SinkhornConfig cfg;
          cfg.epsilon = eps;
          cfg.max_iter = 200000;
          const SinkhornSolution s = solve(c, mu, nu, cfg);
          const SinkhornSolution self = solve_symmetric(c, mu, cfg);
          const double kappa = contraction_estimate(c, *box, eps).kappa;
          for (const SinkhornSolution* sol : {&s, &self}) {
            if (!sol->converged) continue;
            ++runs;
            const auto& nu_w = sol == &s ? nu.weights() : mu.weights();
            worst_marginal =
                std::max(worst_marginal, sol->plan.max_marginal_error(mu.weights(), nu_w));
            worst_gap = std::max(worst_gap, sol->duality_gap);
          }
          if (s.converged) {
            for (double ratio : observed_contraction_ratios(s)) {
              ++ratios_checked;
              worst_excess = std::max(worst_excess, ratio - kappa);
            }
          }
        }
      }
    }
  }
  o.detail << "converged runs=" << runs << " max marginal error=" << sci(worst_marginal)
           << " max duality gap=" << sci(worst_gap) << " ratios checked=" << ratios_checked
           << " max(ratio - kappa)=" << sci(worst_excess);
  o.require(runs == 2 * 2 * 3 * 3 * 5, "some solves did not converge");
  o.require(worst_marginal <= 1e-8, "marginal error > 1e-8");
  o.require(worst_gap <= 1e-6, "duality gap > 1e-6");
  o.require(ratios_checked > 0 && worst_excess <= 1e-6, "contraction ratio above the bound");
  return o;
}

Outcome criterion_9() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::size_t literal_violations = 0;
  std::size_t sharp_violations = 0;
  double worst_ratio = 0.0;
  double kl_self = 0.0;
  for (int r = 0; r < 1000; ++r) {
    const std::size_t n = size(rng);
    const PointCloud pts(1, std::vector<double>(n, 0.0));
    const DiscreteMeasure mu =
        DiscreteMeasure::normalized(pts, sinkdiv::testing::random_weights(rng, n, 0.0));
    const DiscreteMeasure nu =
        DiscreteMeasure::normalized(pts, sinkdiv::testing::random_weights(rng, n, 0.01));
    const double tv = tv_norm(mu, nu);
    const double kl = kl_divergence(mu, nu);
    if (tv * tv > kl) ++literal_violations;
    if (tv * tv > 2.0 * kl) ++sharp_violations;
    worst_ratio = std::max(worst_ratio, tv * tv / kl);
    kl_self = std::max(kl_self, std::abs(kl_divergence(mu, mu)));
  }

  // KL(pi, l x l) - KL(mu x nu, l x l) = KL(pi, mu x nu) for couplings pi of (mu, nu),
  // l the uniform measure on each support.
  double worst_identity = 0.0;
  for (int r = 0; r < 200; ++r) {
    const std::size_t n = size(rng);
    const std::size_t m = size(rng);
    std::vector<double> pi = sinkdiv::testing::random_weights(rng, n * m, 0.01);
    double total = 0.0;
    for (double p : pi) total += p;
    for (double& p : pi) p /= total;
    std::vector<double> a(n, 0.0);
    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        a[i] += pi[i * m + j];
        b[j] += pi[i * m + j];
      }
    }
    const DiscreteMeasure mu(PointCloud(1, std::vector<double>(n, 0.0)), a);
    const DiscreteMeasure nu(PointCloud(1, std::vector<double>(m, 1.0)), b);
    const DiscreteMeasure prod = product_measure(mu, nu);
    const DiscreteMeasure lam = product_measure(DiscreteMeasure::uniform(mu.points()),
                                                DiscreteMeasure::uniform(nu.points()));
    const DiscreteMeasure plan(prod.points(), pi);
    const double lhs = kl_divergence(plan, lam) - kl_divergence(prod, lam);
    worst_identity = std::max(worst_identity, std::abs(lhs - kl_divergence(plan, prod)));
  }
  o.detail << "tv^2 <= KL violated on " << literal_violations << "/1000 pairs (max tv^2/KL="
           << std::setprecision(4) << worst_ratio << "); tv^2 <= 2 KL violated on "
           << sharp_violations << "/1000; max |KL(mu,mu)|=" << sci(kl_self)
           << " entropy-offset identity error=" << sci(worst_identity);
  o.require(literal_violations == 0,
            "tv^2 <= KL is false for tv = sum |mu_j - nu_j| (the sharp constant is 2)");
  o.require(sharp_violations == 0, "tv^2 <= 2 KL");
  o.require(kl_self == 0.0, "KL(mu,mu) != 0");
  o.require(worst_identity <= 1e-10, "entropy-offset identity");
  return o;
}

Outcome criterion_10() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1010);
  const BoundingBox box({-1.0, -1.0}, {1.0, 1.0});
  std::uniform_int_distribution<std::size_t> atoms(1, 5);
  std::uniform_int_distribution<std::size_t> target_size(5, 25);
  const std::vector<double> finite_eps = {0.1, 0.5, 2.0};
  double worst_inf = 0.0;
  double worst_finite = 0.0;
  for (int r = 0; r < 20; ++r) {
    DitherConfig cfg = r % 4 < 2 ? DitherConfig::smoothed_distance(box)
                                 : DitherConfig(box, Cost::negated(Kernel(kernel::Gaussian{0.7}, box), box));
    cfg.atoms = atoms(rng);
    const bool infinite = r % 2 == 0;
    cfg.epsilon = infinite ? kInfiniteEpsilon : finite_eps[static_cast<std::size_t>(r / 2) % 3];
    const auto target = random_measure(rng, box, target_size(rng));
    const PointCloud p = sinkdiv::testing::random_cloud(rng, box, cfg.atoms);
    const double err = gradient_fd_error(cfg, target, p);
    (infinite ? worst_inf : worst_finite) = std::max(infinite ? worst_inf : worst_finite, err);
  }
  const double t = seconds_since(t0);
  o.detail << "max relative FD error: eps=inf " << sci(worst_inf) << ", finite eps "
           << sci(worst_finite) << " time=" << std::setprecision(3) << t << "s";
  o.require(worst_inf <= 1e-4, "eps=inf gradient");
  o.require(worst_finite <= 1e-4, "finite-eps gradient");
  o.require(t < 60.0, "runtime >= 60 s");
  return o;
}

Outcome criterion_11() {
  Outcome o;
  const auto t0 = Clock::now();
  const BoundingBox box({-1.0, -1.0}, {1.0, 1.0});
  const DiscreteMeasure target = sample_grid_density(
      [](ConstPoint x) { return std::exp(-4.5 * (x[0] * x[0] + x[1] * x[1])); }, box, 30);
  const std::vector<double> eps = {0.03, 0.15, 1.25, kInfiniteEpsilon};
  std::vector<double> finals;
  bool reduced = true;
  bool monotone = true;
  for (double e : eps) {
    DitherConfig cfg = DitherConfig::smoothed_distance(box);
    cfg.atoms = 50;
    cfg.epsilon = e;
    cfg.seed = 11;
    const DitherState st = dither(cfg, target);
    const double initial = st.trace.front().energy;
    for (std::size_t t = 1; t < st.trace.size(); ++t) {
      if (st.trace[t].energy > st.trace[t - 1].energy) monotone = false;
    }
    // The tenfold reduction is stated for the eps = inf run. For small eps, S_eps
    // is close to W_1, whose 50-point quantization floor (~0.035 here) is above
    // a tenth of the random start, so those ratios are reported only.
    if (std::isinf(e) && !(st.energy <= 0.1 * initial)) reduced = false;
    finals.push_back(st.energy);
    o.detail << "eps=" << e << ": " << sci(initial) << " -> " << sci(st.energy) << " (x"
             << std::setprecision(3) << st.energy / initial << ") in " << st.trace.back().iter
             << " steps; ";
  }
  bool ordered = true;
  for (std::size_t t = 1; t < finals.size(); ++t) ordered = ordered && finals[t] < finals[t - 1];
  const double t = seconds_since(t0);
  o.detail << "time=" << std::setprecision(3) << t << "s";
  o.require(reduced, "eps=inf final energy > 0.1 x initial");
  o.require(monotone, "energy trace not monotone");
  o.require(ordered, "final energies not decreasing in eps");
  o.require(t < 600.0, "runtime >= 10 min");
  return o;
}

Outcome criterion_12() {
  Outcome o;
  const auto mu = sinkdiv::testing::toy_mu();
  const auto nu = sinkdiv::testing::toy_nu();
  const BoundingBox box = sinkdiv::testing::unit_interval();
  const Cost c(cost::AbsDistance{}, box);
  const double eps = 1e-4;
  const SinkhornSolution s = solve(c, mu, nu, tight(eps));
  // Both potentials extended to the union of the supports.
  PointCloud pts = mu.points();
  for (std::size_t j = 0; j < nu.size(); ++j) pts.push_back(nu.point(j));
  const auto phi = softmin(c, nu, s.potentials.psi, eps, pts);
  const auto psi = softmin(c, mu, s.potentials.phi, eps, pts);
  double worst = 0.0;
  for (std::size_t q = 0; q < pts.size(); ++q) worst = std::max(worst, std::abs(phi[q] + psi[q]));
  o.detail << "sup |phi + psi| on supp(mu) u supp(nu)=" << sci(worst);
  o.require(s.converged, "solve did not converge");
  o.require(worst <= 1e-2, "> 1e-2");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "four-atom instance: exact 0.1, Sinkhorn at eps=1e-4", criterion_1},
      {2, "OT_eps monotone in eps on random instances", criterion_2},
      {3, "eps -> inf limits of value and potentials", criterion_3},
      {4, "eps -> 0 limit of the value", criterion_4},
      {5, "S_eps at large eps equals D_K^2 / 2", criterion_5},
      {6, "kernel-shift invariance of D and the witness", criterion_6},
      {7, "spectral and Gram discrepancies agree", criterion_7},
      {8, "solver soundness: marginals, gap, contraction", criterion_8},
      {9, "Pinsker inequality and KL identities", criterion_9},
      {10, "dither gradients match finite differences", criterion_10},
      {11, "desk-scale dithering", criterion_11},
      {12, "small-eps potential antisymmetry", criterion_12},
  };
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << "AC" << c.id << " " << c.name << ": "
              << out.detail.str() << std::endl;
    if (!out.pass) ++failures;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
