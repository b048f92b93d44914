#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sinkdiv/kernels.hpp"
#include "sinkdiv/measures.hpp"

namespace sinkdiv {

struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major

  double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  // Largest |row_i - mu_i| and |col_j - nu_j|.
  double max_marginal_error(std::span<const double> mu, std::span<const double> nu) const;
};

struct ExactOTResult {
  double value = 0.0;
  TransportPlan plan;
  // Dual certificate: phi_i + psi_j <= c_ij, equality on the plan's support.
  std::vector<double> phi;
  std::vector<double> psi;
  std::size_t pivots = 0;
};

inline constexpr std::size_t kExactOTMaxCells = 1'000'000;

// Integral of |F_mu - F_nu| over the merged breakpoints (cost |x - y| on R).
double wasserstein1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Transportation simplex on the cost matrix of (mu, nu).
ExactOTResult exact_ot(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu);
ExactOTResult exact_ot(const Matrix& cost, std::span<const double> supply,
                       std::span<const double> demand);

// max_{i,j} phi_i + psi_j - c(x_i, y_j)
double dual_feasibility_check(const Cost& cost, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, std::span<const double> phi,
                              std::span<const double> psi);

double plan_cost(const Matrix& cost, const TransportPlan& plan);

}  // namespace sinkdiv
