#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sinkdiv/measures.hpp"

namespace sinkdiv {

class Kernel;

namespace kernel {

// exp(-r^2 / c^2)
struct Gaussian {
  double c = 1.0;
};
// (c^2 + r^2)^(-p)
struct InverseMultiquadric {
  double c = 1.0;
  double p = 0.5;
};
// (1 - r)_+^p, positive definite in R^d for p >= floor(d/2) + 1
struct WendlandPower {
  double p = 1.0;
};
// -r, conditionally positive definite of order 1
struct NegativeDistance {};
// C - r
struct ShiftedNegativeDistance {
  double C = 1.0;
};
// -sqrt(c^2 + r^2), conditionally positive definite of order 1
struct SmoothedNegativeDistance {
  double c = 1e-2;
};
// K(x,y) - K(u,y) - K(x,u) + K(u,u) for a base kernel K and anchor u
struct CpdShifted {
  std::shared_ptr<const Kernel> base;
  std::vector<double> anchor;
};

}  // namespace kernel

using KernelVariant =
    std::variant<kernel::Gaussian, kernel::InverseMultiquadric, kernel::WendlandPower,
                 kernel::NegativeDistance, kernel::ShiftedNegativeDistance,
                 kernel::SmoothedNegativeDistance, kernel::CpdShifted>;

// A symmetric kernel on a bounding box, carrying an upper bound for its
// Lipschitz constant in either argument over that box.
class Kernel {
 public:
  Kernel(KernelVariant variant, const BoundingBox& box);

  double operator()(ConstPoint x, ConstPoint y) const;
  double eval(ConstPoint x, ConstPoint y) const { return (*this)(x, y); }

  // Gradient in the second argument. Throws NonDifferentiablePoint at x == y
  // for variants with a cone there.
  std::vector<double> gradient(ConstPoint x, ConstPoint y) const;
  void add_gradient(ConstPoint x, ConstPoint y, double scale, std::span<double> out) const;

  double lipschitz() const { return lipschitz_; }
  const KernelVariant& variant() const { return variant_; }
  std::size_t dim() const { return dim_; }
  std::string name() const;

  // True for the order-1 conditionally positive definite variants that are
  // not positive definite themselves.
  bool is_order1_cpd() const;

 private:
  KernelVariant variant_;
  std::size_t dim_;
  double lipschitz_ = 0.0;
};

// Default constant for ShiftedNegativeDistance on a box: twice its diameter.
double default_distance_shift(const BoundingBox& box);

Kernel make_cpd_shifted(const Kernel& base, std::vector<double> anchor, const BoundingBox& box);

// Row-major n x m matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data.data() + i * cols, cols);
  }
};

Matrix gram(const Kernel& k, const PointCloud& xs, const PointCloud& ys);

// Draws n uniform points in the box and returns the smallest eigenvalue of
// their Gram matrix.
double empirical_pd_check(const Kernel& k, std::size_t n, std::uint64_t seed,
                          const BoundingBox& box);

namespace cost {

// |x - y|
struct AbsDistance {};
// |x - y|^p, p >= 1
struct PowerDistance {
  double p = 2.0;
};
// c = -K
struct NegatedKernel {
  std::shared_ptr<const Kernel> kernel;
};

}  // namespace cost

using CostVariant = std::variant<cost::AbsDistance, cost::PowerDistance, cost::NegatedKernel>;

class Cost {
 public:
  Cost(CostVariant variant, const BoundingBox& box);
  static Cost negated(const Kernel& k, const BoundingBox& box);

  double operator()(ConstPoint x, ConstPoint y) const;
  std::vector<double> gradient(ConstPoint x, ConstPoint y) const;
  void add_gradient(ConstPoint x, ConstPoint y, double scale, std::span<double> out) const;

  double lipschitz() const { return lipschitz_; }
  const CostVariant& variant() const { return variant_; }
  std::size_t dim() const { return dim_; }
  std::string name() const;

  // Kernel K with c = -K, or nullptr for explicit distance costs.
  const Kernel* kernel() const;

 private:
  CostVariant variant_;
  std::size_t dim_;
  double lipschitz_ = 0.0;
};

Matrix cost_matrix(const Cost& c, const PointCloud& xs, const PointCloud& ys);

}  // namespace sinkdiv
