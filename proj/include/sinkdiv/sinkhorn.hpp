#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sinkdiv/exact_ot.hpp"
#include "sinkdiv/kernels.hpp"
#include "sinkdiv/measures.hpp"

namespace sinkdiv {

struct SinkhornConfig {
  double epsilon = 1.0;
  std::size_t max_iter = 10000;
  // Stop once the oscillation norm of successive psi iterates is <= tol.
  double tol = 1e-10;
  // Shift the potentials afterwards so that Sum phi_i mu_i = OT_inf / 2.
  bool normalize = true;
  // Starting psi on supp(nu); empty means zero.
  std::vector<double> initial_psi;

  void check() const;
};

struct PotentialPair {
  std::vector<double> phi;  // on supp(mu)
  std::vector<double> psi;  // on supp(nu)
  double epsilon = 0.0;
  bool normalized = false;
};

struct SinkhornSolution {
  PotentialPair potentials;
  double value = 0.0;  // OT_eps
  TransportPlan plan;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  double duality_gap = 0.0;
  bool converged = false;
  // Oscillation norm of each psi update, in iteration order.
  std::vector<double> residuals;
};

struct LimitPotentials {
  std::vector<double> phi_inf;
  std::vector<double> psi_inf;
  double ot_inf = 0.0;
};

struct ContractionEstimate {
  double lipschitz = 0.0;
  double diameter = 0.0;
  double epsilon = 0.0;
  double kappa = 0.0;  // 1 - exp(-2 L diam / eps)
};

// 1/2 (max f - min f)
double oscillation_norm(std::span<const double> f);

// T(phi)(x) = -eps log Sum_j m_j exp((phi_j - c(x, y_j)) / eps) at every query x,
// evaluated with a max-shift.
std::vector<double> softmin(const Cost& cost, const DiscreteMeasure& m, std::span<const double> phi,
                            double epsilon, const PointCloud& queries);

// Alternating Sinkhorn iteration from psi^(0) (zero unless cfg.initial_psi is set).
SinkhornSolution solve(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const SinkhornConfig& cfg);

// OT_eps(mu, mu) with the averaged single-potential update phi <- (phi + T(phi)) / 2.
SinkhornSolution solve_symmetric(const Cost& cost, const DiscreteMeasure& mu,
                                 const SinkhornConfig& cfg);

// Same, on a precomputed cost matrix.
SinkhornSolution solve(const Matrix& cost, std::span<const double> mu, std::span<const double> nu,
                       const SinkhornConfig& cfg);
SinkhornSolution solve_symmetric(const Matrix& cost, std::span<const double> mu,
                                 const SinkhornConfig& cfg);

LimitPotentials ot_infinity(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu);
LimitPotentials ot_infinity(const Matrix& cost, std::span<const double> mu,
                            std::span<const double> nu);

// phi_inf(x) = Sum_j c(x, y_j) nu_j - ot_inf / 2 at arbitrary points.
std::vector<double> limit_potential_at(const Cost& cost, const DiscreteMeasure& nu, double ot_inf,
                                       const PointCloud& queries);

ContractionEstimate contraction_estimate(const Cost& cost, const BoundingBox& box, double epsilon);
ContractionEstimate contraction_estimate(double lipschitz, double diameter, double epsilon);

// Per-iteration ratios residual_i / residual_{i-1} (i >= 2), skipping pairs
// whose residuals sit at the floating-point noise floor.
std::vector<double> observed_contraction_ratios(const SinkhornSolution& s);

using ProbePair = std::pair<std::vector<double>, std::vector<double>>;

// max over probe pairs of |T(phi)(x1) - T(phi)(x2)| / |x1 - x2|
double potential_lipschitz_check(const Cost& cost, const DiscreteMeasure& m,
                                 std::span<const double> phi, double epsilon,
                                 const std::vector<ProbePair>& probes);

}  // namespace sinkdiv
