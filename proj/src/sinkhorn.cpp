#include "sinkdiv/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sinkdiv/errors.hpp"

namespace sinkdiv {

void SinkhornConfig::check() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("Sinkhorn epsilon must be positive and finite");
  }
  if (!(tol > 0.0)) throw InvalidArgument("Sinkhorn tol must be positive");
  if (max_iter == 0) throw InvalidArgument("Sinkhorn max_iter must be positive");
}

double oscillation_norm(std::span<const double> f) {
  if (f.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return 0.5 * (*hi - *lo);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// -eps (max a + log Sum_j w_j exp(a_j - max a)), a_j = (g_j - c_j) / eps.
// Zero-weight atoms are skipped.
double softmin_row(std::span<const double> c, std::span<const double> w,
                   std::span<const double> g, double eps, std::vector<double>& scratch) {
  const std::size_t n = c.size();
  scratch.resize(n);
  double amax = kNegInf;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = (g[j] - c[j]) / eps;
    scratch[j] = a;
    if (w[j] > 0.0 && a > amax) amax = a;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j] > 0.0) s += w[j] * std::exp(scratch[j] - amax);
  }
  return -eps * (amax + std::log(s));
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  }
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Normalization, value, plan and duality gap from converged potentials.
void finish(const Matrix& cost, std::span<const double> mu, std::span<const double> nu,
            const SinkhornConfig& cfg, SinkhornSolution& sol) {
  auto& phi = sol.potentials.phi;
  auto& psi = sol.potentials.psi;
  sol.potentials.epsilon = cfg.epsilon;
  if (cfg.normalize) {
    const LimitPotentials lim = ot_infinity(cost, mu, nu);
    const double delta = 0.5 * lim.ot_inf - dot(phi, mu);
    for (double& p : phi) p += delta;
    for (double& p : psi) p -= delta;
    sol.potentials.normalized = true;
  }
  sol.value = dot(phi, mu) + dot(psi, nu);

  const double eps = cfg.epsilon;
  sol.plan.rows = cost.rows;
  sol.plan.cols = cost.cols;
  sol.plan.entries.assign(cost.rows * cost.cols, 0.0);
  double transport = 0.0;
  double entropic = 0.0;
  for (std::size_t i = 0; i < cost.rows; ++i) {
    for (std::size_t j = 0; j < cost.cols; ++j) {
      const double log_ratio = (phi[i] + psi[j] - cost(i, j)) / eps;
      const double p = mu[i] * nu[j] * std::exp(log_ratio);
      sol.plan.entries[i * cost.cols + j] = p;
      if (p > 0.0) {
        transport += cost(i, j) * p;
        entropic += p * log_ratio;
      }
    }
  }
  sol.duality_gap = std::abs(transport + eps * entropic - sol.value);
}

}  // namespace

std::vector<double> softmin(const Cost& cost, const DiscreteMeasure& m, std::span<const double> phi,
                            double epsilon, const PointCloud& queries) {
  if (!(epsilon > 0.0)) throw InvalidArgument("softmin requires epsilon > 0");
  if (phi.size() != m.size()) throw DimensionMismatch("softmin: potential size differs from support");
  std::vector<double> out(queries.size());
  std::vector<double> c(m.size());
  std::vector<double> scratch;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (std::size_t j = 0; j < m.size(); ++j) c[j] = cost(queries[q], m.point(j));
    out[q] = softmin_row(c, m.weights(), phi, epsilon, scratch);
  }
  return out;
}

SinkhornSolution solve(const Matrix& cost, std::span<const double> mu, std::span<const double> nu,
                       const SinkhornConfig& cfg) {
  cfg.check();
  if (cost.rows != mu.size() || cost.cols != nu.size()) {
    throw DimensionMismatch("solve: cost matrix shape does not match the marginals");
  }
  const Matrix cost_t = transpose(cost);
  SinkhornSolution sol;
  auto& phi = sol.potentials.phi;
  auto& psi = sol.potentials.psi;
  phi.assign(mu.size(), 0.0);
  if (cfg.initial_psi.empty()) {
    psi.assign(nu.size(), 0.0);
  } else {
    if (cfg.initial_psi.size() != nu.size()) throw DimensionMismatch("initial_psi size");
    psi = cfg.initial_psi;
  }
  std::vector<double> next(nu.size());
  std::vector<double> diff(nu.size());
  std::vector<double> scratch;
  const double eps = cfg.epsilon;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    for (std::size_t i = 0; i < mu.size(); ++i) phi[i] = softmin_row(cost.row(i), nu, psi, eps, scratch);
    for (std::size_t j = 0; j < nu.size(); ++j) next[j] = softmin_row(cost_t.row(j), mu, phi, eps, scratch);
    for (std::size_t j = 0; j < nu.size(); ++j) diff[j] = next[j] - psi[j];
    psi.swap(next);
    const double r = oscillation_norm(diff);
    sol.residuals.push_back(r);
    sol.iterations = it;
    sol.final_residual = r;
    if (r <= cfg.tol) {
      sol.converged = true;
      break;
    }
  }
  finish(cost, mu, nu, cfg, sol);
  return sol;
}

SinkhornSolution solve_symmetric(const Matrix& cost, std::span<const double> mu,
                                 const SinkhornConfig& cfg) {
  cfg.check();
  if (cost.rows != mu.size() || cost.cols != mu.size()) {
    throw DimensionMismatch("solve_symmetric: cost matrix must be square over supp(mu)");
  }
  SinkhornSolution sol;
  std::vector<double> phi(mu.size(), 0.0);
  if (!cfg.initial_psi.empty()) {
    if (cfg.initial_psi.size() != mu.size()) throw DimensionMismatch("initial_psi size");
    phi = cfg.initial_psi;
  }
  std::vector<double> diff(mu.size());
  std::vector<double> scratch;
  const double eps = cfg.epsilon;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    // cost is symmetric, so row i is the column over supp(mu) as well
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double t = softmin_row(cost.row(i), mu, phi, eps, scratch);
      diff[i] = 0.5 * (t - phi[i]);
    }
    for (std::size_t i = 0; i < mu.size(); ++i) phi[i] += diff[i];
    const double r = oscillation_norm(diff);
    sol.residuals.push_back(r);
    sol.iterations = it;
    sol.final_residual = r;
    if (r <= cfg.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.potentials.phi = phi;
  sol.potentials.psi = std::move(phi);
  finish(cost, mu, mu, cfg, sol);
  return sol;
}

SinkhornSolution solve(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const SinkhornConfig& cfg) {
  if (mu.dim() != nu.dim()) throw DimensionMismatch("solve: measure dimensions differ");
  return solve(cost_matrix(cost, mu.points(), nu.points()), mu.weights(), nu.weights(), cfg);
}

SinkhornSolution solve_symmetric(const Cost& cost, const DiscreteMeasure& mu,
                                 const SinkhornConfig& cfg) {
  return solve_symmetric(cost_matrix(cost, mu.points(), mu.points()), mu.weights(), cfg);
}

LimitPotentials ot_infinity(const Matrix& cost, std::span<const double> mu,
                            std::span<const double> nu) {
  if (cost.rows != mu.size() || cost.cols != nu.size()) {
    throw DimensionMismatch("ot_infinity: cost matrix shape does not match the marginals");
  }
  LimitPotentials lim;
  lim.phi_inf.assign(mu.size(), 0.0);
  lim.psi_inf.assign(nu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) s += cost(i, j) * nu[j];
    lim.phi_inf[i] = s;
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) lim.psi_inf[j] += cost(i, j) * mu[i];
  }
  lim.ot_inf = dot(lim.phi_inf, mu);
  const double half = 0.5 * lim.ot_inf;
  for (double& p : lim.phi_inf) p -= half;
  for (double& p : lim.psi_inf) p -= half;
  return lim;
}

LimitPotentials ot_infinity(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return ot_infinity(cost_matrix(cost, mu.points(), nu.points()), mu.weights(), nu.weights());
}

std::vector<double> limit_potential_at(const Cost& cost, const DiscreteMeasure& nu, double ot_inf,
                                       const PointCloud& queries) {
  std::vector<double> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double s = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) s += cost(queries[q], nu.point(j)) * nu.weight(j);
    out[q] = s - 0.5 * ot_inf;
  }
  return out;
}

ContractionEstimate contraction_estimate(double lipschitz, double diameter, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("contraction_estimate requires epsilon > 0");
  ContractionEstimate e;
  e.lipschitz = lipschitz;
  e.diameter = diameter;
  e.epsilon = epsilon;
  e.kappa = -std::expm1(-2.0 * lipschitz * diameter / epsilon);
  return e;
}

ContractionEstimate contraction_estimate(const Cost& cost, const BoundingBox& box, double epsilon) {
  return contraction_estimate(cost.lipschitz(), box.diameter(), epsilon);
}

std::vector<double> observed_contraction_ratios(const SinkhornSolution& s) {
  double scale = 1.0;
  for (double p : s.potentials.phi) scale = std::max(scale, std::abs(p));
  for (double p : s.potentials.psi) scale = std::max(scale, std::abs(p));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  std::vector<double> ratios;
  for (std::size_t i = 1; i < s.residuals.size(); ++i) {
    if (s.residuals[i - 1] > floor && s.residuals[i] > floor) {
      ratios.push_back(s.residuals[i] / s.residuals[i - 1]);
    }
  }
  return ratios;
}

double potential_lipschitz_check(const Cost& cost, const DiscreteMeasure& m,
                                 std::span<const double> phi, double epsilon,
                                 const std::vector<ProbePair>& probes) {
  double worst = 0.0;
  PointCloud q;
  for (const auto& [a, b] : probes) {
    const double d = euclidean_distance(a, b);
    if (d == 0.0) continue;
    q = PointCloud(a.size(), a);
    q.push_back(b);
    const auto t = softmin(cost, m, phi, epsilon, q);
    worst = std::max(worst, std::abs(t[0] - t[1]) / d);
  }
  return worst;
}

}  // namespace sinkdiv
