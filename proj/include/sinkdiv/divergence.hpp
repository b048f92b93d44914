#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sinkdiv/discrepancy.hpp"
#include "sinkdiv/kernels.hpp"
#include "sinkdiv/measures.hpp"
#include "sinkdiv/sinkhorn.hpp"

namespace sinkdiv {

inline constexpr double kInfiniteEpsilon = std::numeric_limits<double>::infinity();

struct DivergenceResult {
  double s_eps = 0.0;
  double ot_mu_nu = 0.0;
  double ot_mu_mu = 0.0;
  double ot_nu_nu = 0.0;
  double epsilon = 0.0;  // +inf for the limit
  // Labels ("mu_nu", "mu_mu", "nu_nu") of solves that hit max_iter.
  std::vector<std::string> not_converged;

  bool converged() const { return not_converged.empty(); }
};

struct DivergenceSolutions {
  SinkhornSolution mu_nu;
  SinkhornSolution mu_mu;
  SinkhornSolution nu_nu;
  DivergenceResult result;
};

// S_eps = OT_eps(mu,nu) - OT_eps(mu,mu)/2 - OT_eps(nu,nu)/2; cross term by
// alternation, self terms by the symmetric solver.
DivergenceResult sinkhorn_divergence(const Cost& cost, const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu, const SinkhornConfig& cfg);
DivergenceSolutions sinkhorn_divergence_detailed(const Cost& cost, const DiscreteMeasure& mu,
                                                 const DiscreteMeasure& nu,
                                                 const SinkhornConfig& cfg);

// D_K^2 / 2 for c = -K. Throws NotNegatedKernel for explicit distance costs.
double s_infinity(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// OT_inf(mu,nu) - OT_inf(mu,mu)/2 - OT_inf(nu,nu)/2 for any cost.
double s_infinity_from_limits(const Cost& cost, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu);

// The kernel used in the limit: order-1 cpd kernels are anchor-shifted at the
// box's lower corner, everything else is returned as is.
Kernel limit_kernel(const Kernel& k, const BoundingBox& box);

// (phi_inf - psi_inf) / D_K at the query points, with phi_inf, psi_inf the
// eps -> inf limit potentials for c = -limit_kernel(k).
std::vector<double> witness_from_limits(const Kernel& k, const DiscreteMeasure& mu,
                                        const DiscreteMeasure& nu, const PointCloud& queries,
                                        const BoundingBox& box);

// Witness of the anchor-shifted kernel written through the unshifted one:
// (Sum mu K(x_i,.) - Sum nu K(y_j,.) + c_nu - c_mu) / D_K, c_mu = Sum mu_i K(x_i, u).
std::vector<double> cpd_witness_from_base(const Kernel& k, ConstPoint anchor,
                                          const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          const PointCloud& queries);

struct SweepRecord {
  double epsilon = 0.0;
  double ot_eps = 0.0;
  double s_eps = 0.0;
  double phi_dist_to_inf = 0.0;
  double psi_dist_to_inf = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

std::vector<double> log_spaced(double lo, double hi, std::size_t count);
// 25 log-spaced values in [1e-4, 1e3].
std::vector<double> default_epsilon_grid();

// One cold solve per epsilon plus a terminal eps = inf record from the limits.
std::vector<SweepRecord> epsilon_sweep(const Cost& cost, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu,
                                       const std::vector<double>& epsilons,
                                       const SinkhornConfig& cfg_template);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

}  // namespace sinkdiv
