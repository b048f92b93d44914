#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "sinkdiv/kernels.hpp"
#include "sinkdiv/measures.hpp"

namespace sinkdiv {

struct DiscrepancyResult {
  double value = 0.0;         // sqrt(max(squared, 0))
  double squared = 0.0;       // raw double-sum, may be slightly negative
  double witness_norm = 0.0;  // RKHS norm of the unnormalized witness (== value)
};

using KernelFunction = std::function<double(ConstPoint, ConstPoint)>;

// Sum_{i,j} a_i b_j K(x_i, y_j), accumulated row by row in stored order.
double kernel_double_sum(const KernelFunction& k, const DiscreteMeasure& a,
                         const DiscreteMeasure& b);

DiscrepancyResult discrepancy(const Kernel& k, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu);
DiscrepancyResult discrepancy(const KernelFunction& k, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu);

inline constexpr double kWitnessThreshold = 1e-14;

// (Sum mu_i K(x_i, x) - Sum nu_j K(y_j, x)) / D_K(mu, nu).
double witness_eval(const Kernel& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    ConstPoint x);
std::vector<double> witness_eval(const Kernel& k, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, const PointCloud& queries);

// Kernel on the 1-torus defined by non-negative Fourier weights alpha_0..alpha_N,
// K(x,y) = alpha_0 + 2 Sum_{k>=1} alpha_k cos(2 pi k (x - y)).
class SpectralKernel {
 public:
  explicit SpectralKernel(std::vector<double> alpha);

  std::size_t order() const { return alpha_.size() - 1; }
  const std::vector<double>& alpha() const { return alpha_; }
  double operator()(ConstPoint x, ConstPoint y) const;

 private:
  std::vector<double> alpha_;
};

// mu_hat_k = Sum_j mu_j exp(-2 pi i k x_j) for k = -N..N, stored at index k + N.
struct FourierCoeffs {
  int order = 0;
  std::vector<std::complex<double>> values;

  std::complex<double> at(int k) const { return values[static_cast<std::size_t>(k + order)]; }
};

FourierCoeffs fourier_coefficients(const DiscreteMeasure& m, int order);

DiscrepancyResult spectral_discrepancy(const SpectralKernel& sk, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu);

// (1/(2M^2)) Sum_{i,j} K(p_i,p_j) - (1/M) Sum_i Sum_a w_a K(x_a,p_i).
double halftoning_energy(const Kernel& k, const DiscreteMeasure& target,
                         const PointCloud& positions);

}  // namespace sinkdiv
