#include "sinkdiv/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sinkdiv/errors.hpp"

namespace sinkdiv {

DivergenceSolutions sinkhorn_divergence_detailed(const Cost& cost, const DiscreteMeasure& mu,
                                                 const DiscreteMeasure& nu,
                                                 const SinkhornConfig& cfg) {
  if (mu.dim() != nu.dim()) throw DimensionMismatch("sinkhorn_divergence: dimensions differ");
  SinkhornConfig plain = cfg;
  plain.initial_psi.clear();
  DivergenceSolutions out;
  out.mu_nu = solve(cost, mu, nu, cfg);
  out.mu_mu = solve_symmetric(cost, mu, plain);
  out.nu_nu = solve_symmetric(cost, nu, plain);
  auto& r = out.result;
  r.epsilon = cfg.epsilon;
  r.ot_mu_nu = out.mu_nu.value;
  r.ot_mu_mu = out.mu_mu.value;
  r.ot_nu_nu = out.nu_nu.value;
  r.s_eps = r.ot_mu_nu - 0.5 * r.ot_mu_mu - 0.5 * r.ot_nu_nu;
  if (!out.mu_nu.converged) r.not_converged.push_back("mu_nu");
  if (!out.mu_mu.converged) r.not_converged.push_back("mu_mu");
  if (!out.nu_nu.converged) r.not_converged.push_back("nu_nu");
  return out;
}

DivergenceResult sinkhorn_divergence(const Cost& cost, const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu, const SinkhornConfig& cfg) {
  return sinkhorn_divergence_detailed(cost, mu, nu, cfg).result;
}

double s_infinity(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Kernel* k = cost.kernel();
  if (k == nullptr) {
    throw NotNegatedKernel("s_infinity needs a cost of the form c = -K, got " + cost.name());
  }
  return 0.5 * discrepancy(*k, mu, nu).squared;
}

double s_infinity_from_limits(const Cost& cost, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu) {
  const double mn = ot_infinity(cost, mu, nu).ot_inf;
  const double mm = ot_infinity(cost, mu, mu).ot_inf;
  const double nn = ot_infinity(cost, nu, nu).ot_inf;
  return mn - 0.5 * mm - 0.5 * nn;
}

Kernel limit_kernel(const Kernel& k, const BoundingBox& box) {
  if (k.is_order1_cpd()) return make_cpd_shifted(k, box.lower(), box);
  return k;
}

std::vector<double> witness_from_limits(const Kernel& k, const DiscreteMeasure& mu,
                                        const DiscreteMeasure& nu, const PointCloud& queries,
                                        const BoundingBox& box) {
  const Kernel shifted = limit_kernel(k, box);
  const double d = discrepancy(shifted, mu, nu).value;
  if (d <= kWitnessThreshold) throw ZeroDiscrepancy("witness undefined: discrepancy vanishes");
  const Cost c = Cost::negated(shifted, box);
  const double ot_inf = ot_infinity(c, mu, nu).ot_inf;
  const auto phi_inf = limit_potential_at(c, nu, ot_inf, queries);
  const auto psi_inf = limit_potential_at(c, mu, ot_inf, queries);
  std::vector<double> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) out[q] = (phi_inf[q] - psi_inf[q]) / d;
  return out;
}

std::vector<double> cpd_witness_from_base(const Kernel& k, ConstPoint anchor,
                                          const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          const PointCloud& queries) {
  const double d = discrepancy(k, mu, nu).value;
  if (d <= kWitnessThreshold) throw ZeroDiscrepancy("witness undefined: discrepancy vanishes");
  double c_mu = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) c_mu += mu.weight(i) * k(mu.point(i), anchor);
  double c_nu = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) c_nu += nu.weight(j) * k(nu.point(j), anchor);
  std::vector<double> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double a = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) a += mu.weight(i) * k(mu.point(i), queries[q]);
    double b = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) b += nu.weight(j) * k(nu.point(j), queries[q]);
    out[q] = (a - b + c_nu - c_mu) / d;
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw InvalidArgument("log_spaced needs 0 < lo < hi and count >= 2");
  }
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t t = 0; t < count; ++t) {
    out[t] = std::pow(10.0, a + (b - a) * static_cast<double>(t) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_epsilon_grid() { return log_spaced(1e-4, 1e3, 25); }

namespace {

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

std::vector<SweepRecord> epsilon_sweep(const Cost& cost, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu,
                                       const std::vector<double>& epsilons,
                                       const SinkhornConfig& cfg_template) {
  for (std::size_t t = 0; t < epsilons.size(); ++t) {
    if (!(epsilons[t] > 0.0) || !std::isfinite(epsilons[t])) {
      throw InvalidArgument("sweep epsilons must be positive and finite");
    }
    if (t > 0 && !(epsilons[t] > epsilons[t - 1])) {
      throw InvalidArgument("sweep epsilons must be strictly increasing");
    }
  }
  const LimitPotentials lim = ot_infinity(cost, mu, nu);
  std::vector<SweepRecord> records;
  records.reserve(epsilons.size() + 1);
  for (double eps : epsilons) {
    SinkhornConfig cfg = cfg_template;
    cfg.epsilon = eps;
    cfg.normalize = true;
    cfg.initial_psi.clear();
    const DivergenceSolutions div = sinkhorn_divergence_detailed(cost, mu, nu, cfg);
    SweepRecord rec;
    rec.epsilon = eps;
    rec.ot_eps = div.result.ot_mu_nu;
    rec.s_eps = div.result.s_eps;
    rec.phi_dist_to_inf = sup_distance(div.mu_nu.potentials.phi, lim.phi_inf);
    rec.psi_dist_to_inf = sup_distance(div.mu_nu.potentials.psi, lim.psi_inf);
    rec.iterations = div.mu_nu.iterations;
    rec.converged = div.result.converged();
    records.push_back(rec);
  }
  SweepRecord terminal;
  terminal.epsilon = kInfiniteEpsilon;
  terminal.ot_eps = lim.ot_inf;
  if (cost.kernel() != nullptr) {
    terminal.s_eps = s_infinity(cost, mu, nu);
  } else {
    const KernelFunction negated = [&cost](ConstPoint x, ConstPoint y) { return -cost(x, y); };
    terminal.s_eps = 0.5 * discrepancy(negated, mu, nu).squared;
  }
  records.push_back(terminal);
  return records;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  const auto old_precision = out.precision(17);
  out << "epsilon,ot_eps,s_eps,phi_dist_inf,psi_dist_inf,iterations\n";
  for (const auto& r : records) {
    if (std::isinf(r.epsilon)) {
      out << "inf";
    } else {
      out << r.epsilon;
    }
    out << ',' << r.ot_eps << ',' << r.s_eps << ',' << r.phi_dist_to_inf << ','
        << r.psi_dist_to_inf << ',' << r.iterations << '\n';
  }
  out.precision(old_precision);
}

}  // namespace sinkdiv
