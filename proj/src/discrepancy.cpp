#include "sinkdiv/discrepancy.hpp"

#include <cmath>
#include <numbers>

#include "sinkdiv/errors.hpp"

namespace sinkdiv {

double kernel_double_sum(const KernelFunction& k, const DiscreteMeasure& a,
                         const DiscreteMeasure& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) row += k(a.point(i), b.point(j)) * b.weight(j);
    total += a.weight(i) * row;
  }
  return total;
}

DiscrepancyResult discrepancy(const KernelFunction& k, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw DimensionMismatch("discrepancy: measure dimensions differ");
  const double mm = kernel_double_sum(k, mu, mu);
  const double nn = kernel_double_sum(k, nu, nu);
  const double mn = kernel_double_sum(k, mu, nu);
  DiscrepancyResult r;
  r.squared = mm + nn - 2.0 * mn;
  r.value = std::sqrt(std::max(r.squared, 0.0));
  r.witness_norm = r.value;
  return r;
}

DiscrepancyResult discrepancy(const Kernel& k, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu) {
  if (mu.dim() != k.dim() || nu.dim() != k.dim()) {
    throw DimensionMismatch("discrepancy: kernel and measure dimensions differ");
  }
  return discrepancy(KernelFunction([&k](ConstPoint x, ConstPoint y) { return k(x, y); }), mu, nu);
}

namespace {

double unnormalized_witness(const Kernel& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            ConstPoint x) {
  double a = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) a += mu.weight(i) * k(mu.point(i), x);
  double b = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) b += nu.weight(j) * k(nu.point(j), x);
  return a - b;
}

double witness_denominator(const Kernel& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const double d = discrepancy(k, mu, nu).value;
  if (d <= kWitnessThreshold) {
    throw ZeroDiscrepancy("witness undefined: discrepancy vanishes");
  }
  return d;
}

}  // namespace

double witness_eval(const Kernel& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    ConstPoint x) {
  return unnormalized_witness(k, mu, nu, x) / witness_denominator(k, mu, nu);
}

std::vector<double> witness_eval(const Kernel& k, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, const PointCloud& queries) {
  const double d = witness_denominator(k, mu, nu);
  std::vector<double> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    out[q] = unnormalized_witness(k, mu, nu, queries[q]) / d;
  }
  return out;
}

SpectralKernel::SpectralKernel(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw InvalidArgument("spectral kernel needs at least alpha_0");
  for (double a : alpha_) {
    if (!(a >= 0.0)) throw InvalidArgument("spectral kernel weights must be non-negative");
  }
}

double SpectralKernel::operator()(ConstPoint x, ConstPoint y) const {
  const double t = x[0] - y[0];
  double v = alpha_[0];
  for (std::size_t k = 1; k < alpha_.size(); ++k) {
    v += 2.0 * alpha_[k] * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * t);
  }
  return v;
}

FourierCoeffs fourier_coefficients(const DiscreteMeasure& m, int order) {
  if (m.dim() != 1) throw DimensionMismatch("Fourier coefficients need a 1-d measure");
  FourierCoeffs c;
  c.order = order;
  c.values.assign(static_cast<std::size_t>(2 * order + 1), {0.0, 0.0});
  for (int k = -order; k <= order; ++k) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) * m.point(j)[0];
      s += m.weight(j) * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    c.values[static_cast<std::size_t>(k + order)] = s;
  }
  return c;
}

DiscrepancyResult spectral_discrepancy(const SpectralKernel& sk, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) {
    throw DimensionMismatch("spectral discrepancy is defined on the 1-torus only");
  }
  const int n = static_cast<int>(sk.order());
  const FourierCoeffs a = fourier_coefficients(mu, n);
  const FourierCoeffs b = fourier_coefficients(nu, n);
  DiscrepancyResult r;
  for (int k = -n; k <= n; ++k) {
    r.squared += sk.alpha()[static_cast<std::size_t>(std::abs(k))] * std::norm(a.at(k) - b.at(k));
  }
  r.value = std::sqrt(std::max(r.squared, 0.0));
  r.witness_norm = r.value;
  return r;
}

double halftoning_energy(const Kernel& k, const DiscreteMeasure& target,
                         const PointCloud& positions) {
  const std::size_t m = positions.size();
  if (m == 0) throw InvalidArgument("halftoning energy needs at least one position");
  const double inv_m = 1.0 / static_cast<double>(m);
  double repulsion = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) repulsion += k(positions[i], positions[j]);
  }
  double attraction = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t a = 0; a < target.size(); ++a) s += target.weight(a) * k(target.point(a), positions[i]);
    attraction += s;
  }
  return 0.5 * inv_m * inv_m * repulsion - inv_m * attraction;
}

}  // namespace sinkdiv
