#include "sinkdiv/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "sinkdiv/errors.hpp"

namespace sinkdiv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double squared_distance(ConstPoint x, ConstPoint y) {
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = x[k] - y[k];
    sq += t * t;
  }
  return sq;
}

// Radial profile h(r) of the radial kernel variants.
double profile(const KernelVariant& v, double r) {
  return std::visit(
      overloaded{
          [&](const kernel::Gaussian& g) { return std::exp(-(r * r) / (g.c * g.c)); },
          [&](const kernel::InverseMultiquadric& q) {
            return std::pow(q.c * q.c + r * r, -q.p);
          },
          [&](const kernel::WendlandPower& w) {
            return r < 1.0 ? std::pow(1.0 - r, w.p) : 0.0;
          },
          [&](const kernel::NegativeDistance&) { return -r; },
          [&](const kernel::ShiftedNegativeDistance& s) { return s.C - r; },
          [&](const kernel::SmoothedNegativeDistance& s) {
            return -std::sqrt(s.c * s.c + r * r);
          },
          [&](const kernel::CpdShifted&) -> double {
            throw InvalidArgument("CpdShifted is not radial");
          },
      },
      v);
}

// h'(r)
double profile_derivative(const KernelVariant& v, double r) {
  return std::visit(
      overloaded{
          [&](const kernel::Gaussian& g) {
            return -2.0 * r / (g.c * g.c) * std::exp(-(r * r) / (g.c * g.c));
          },
          [&](const kernel::InverseMultiquadric& q) {
            return -2.0 * q.p * r * std::pow(q.c * q.c + r * r, -q.p - 1.0);
          },
          [&](const kernel::WendlandPower& w) {
            return r < 1.0 ? -w.p * std::pow(1.0 - r, w.p - 1.0) : 0.0;
          },
          [&](const kernel::NegativeDistance&) { return -1.0; },
          [&](const kernel::ShiftedNegativeDistance&) { return -1.0; },
          [&](const kernel::SmoothedNegativeDistance& s) {
            return -r / std::sqrt(s.c * s.c + r * r);
          },
          [&](const kernel::CpdShifted&) -> double {
            throw InvalidArgument("CpdShifted is not radial");
          },
      },
      v);
}

// max |h'(r)| on a 10^4-node grid over [0, diam], inflated by 5%.
template <class Deriv>
double grid_lipschitz(Deriv&& deriv, double diam) {
  constexpr int kNodes = 10000;
  double best = 0.0;
  for (int t = 0; t < kNodes; ++t) {
    const double r = diam * static_cast<double>(t) / static_cast<double>(kNodes - 1);
    best = std::max(best, std::abs(deriv(r)));
  }
  return 1.05 * best;
}

void check_parameters(const KernelVariant& v, std::size_t dim) {
  std::visit(overloaded{
                 [](const kernel::Gaussian& g) {
                   if (!(g.c > 0.0)) throw InvalidArgument("Gaussian requires c > 0");
                 },
                 [](const kernel::InverseMultiquadric& q) {
                   if (!(q.c > 0.0) || !(q.p > 0.0)) {
                     throw InvalidArgument("InverseMultiquadric requires c > 0 and p > 0");
                   }
                 },
                 [&](const kernel::WendlandPower& w) {
                   const double min_p = std::floor(static_cast<double>(dim) / 2.0) + 1.0;
                   if (!(w.p >= min_p)) {
                     throw InvalidArgument("WendlandPower requires p >= floor(d/2) + 1");
                   }
                 },
                 [](const kernel::NegativeDistance&) {},
                 [](const kernel::ShiftedNegativeDistance& s) {
                   if (!(s.C > 0.0)) throw InvalidArgument("ShiftedNegativeDistance requires C > 0");
                 },
                 [](const kernel::SmoothedNegativeDistance& s) {
                   if (!(s.c > 0.0)) throw InvalidArgument("SmoothedNegativeDistance requires c > 0");
                 },
                 [&](const kernel::CpdShifted& s) {
                   if (!s.base) throw InvalidArgument("CpdShifted requires a base kernel");
                   if (s.anchor.size() != dim) throw DimensionMismatch("CpdShifted anchor dimension");
                 },
             },
             v);
}

bool smooth_at_zero(const KernelVariant& v) {
  return std::holds_alternative<kernel::Gaussian>(v) ||
         std::holds_alternative<kernel::InverseMultiquadric>(v) ||
         std::holds_alternative<kernel::SmoothedNegativeDistance>(v);
}

}  // namespace

Kernel::Kernel(KernelVariant variant, const BoundingBox& box)
    : variant_(std::move(variant)), dim_(box.dim()) {
  check_parameters(variant_, dim_);
  if (const auto* s = std::get_if<kernel::CpdShifted>(&variant_)) {
    // |K~(x,y) - K~(x',y)| <= |K(x,y) - K(x',y)| + |K(x,u) - K(x',u)|
    lipschitz_ = 2.0 * s->base->lipschitz();
  } else {
    lipschitz_ = grid_lipschitz([&](double r) { return profile_derivative(variant_, r); },
                                box.diameter());
  }
}

double Kernel::operator()(ConstPoint x, ConstPoint y) const {
  if (const auto* s = std::get_if<kernel::CpdShifted>(&variant_)) {
    const Kernel& base = *s->base;
    const ConstPoint u(s->anchor);
    // Grouped so that the result is bitwise symmetric and exactly zero at x == u.
    const double diag = base(x, y) + base(u, u);
    const double cross = base(u, x) + base(u, y);
    return diag - cross;
  }
  return profile(variant_, std::sqrt(squared_distance(x, y)));
}

void Kernel::add_gradient(ConstPoint x, ConstPoint y, double scale, std::span<double> out) const {
  if (const auto* s = std::get_if<kernel::CpdShifted>(&variant_)) {
    s->base->add_gradient(x, y, scale, out);
    s->base->add_gradient(ConstPoint(s->anchor), y, -scale, out);
    return;
  }
  const double r = std::sqrt(squared_distance(x, y));
  double slope_over_r = 0.0;
  if (r == 0.0) {
    if (!smooth_at_zero(variant_)) {
      throw NonDifferentiablePoint(name() + " is not differentiable at coincident points");
    }
    return;
  }
  slope_over_r = profile_derivative(variant_, r) / r;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * slope_over_r * (y[k] - x[k]);
}

std::vector<double> Kernel::gradient(ConstPoint x, ConstPoint y) const {
  std::vector<double> g(y.size(), 0.0);
  add_gradient(x, y, 1.0, g);
  return g;
}

std::string Kernel::name() const {
  return std::visit(overloaded{
                        [](const kernel::Gaussian&) { return std::string("Gaussian"); },
                        [](const kernel::InverseMultiquadric&) {
                          return std::string("InverseMultiquadric");
                        },
                        [](const kernel::WendlandPower&) { return std::string("WendlandPower"); },
                        [](const kernel::NegativeDistance&) {
                          return std::string("NegativeDistance");
                        },
                        [](const kernel::ShiftedNegativeDistance&) {
                          return std::string("ShiftedNegativeDistance");
                        },
                        [](const kernel::SmoothedNegativeDistance&) {
                          return std::string("SmoothedNegativeDistance");
                        },
                        [](const kernel::CpdShifted&) { return std::string("CpdShifted"); },
                    },
                    variant_);
}

bool Kernel::is_order1_cpd() const {
  return std::holds_alternative<kernel::NegativeDistance>(variant_) ||
         std::holds_alternative<kernel::SmoothedNegativeDistance>(variant_);
}

double default_distance_shift(const BoundingBox& box) { return 2.0 * box.diameter(); }

Kernel make_cpd_shifted(const Kernel& base, std::vector<double> anchor, const BoundingBox& box) {
  return Kernel(kernel::CpdShifted{std::make_shared<const Kernel>(base), std::move(anchor)}, box);
}

Matrix gram(const Kernel& k, const PointCloud& xs, const PointCloud& ys) {
  if (xs.dim() != ys.dim() && !xs.empty() && !ys.empty()) {
    throw DimensionMismatch("gram: point dimensions differ");
  }
  Matrix g(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) g(i, j) = k(xs[i], ys[j]);
  }
  return g;
}

double empirical_pd_check(const Kernel& k, std::size_t n, std::uint64_t seed,
                          const BoundingBox& box) {
  if (n < 2) throw InvalidArgument("empirical_pd_check needs n >= 2");
  std::mt19937_64 rng(seed);
  std::vector<double> coords;
  coords.reserve(n * box.dim());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < box.dim(); ++a) {
      std::uniform_real_distribution<double> dist(box.lower()[a], box.upper()[a]);
      coords.push_back(dist(rng));
    }
  }
  const PointCloud pts(box.dim(), std::move(coords));
  const Matrix g = gram(k, pts, pts);
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = g(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Cost::Cost(CostVariant variant, const BoundingBox& box)
    : variant_(std::move(variant)), dim_(box.dim()) {
  const double diam = box.diameter();
  std::visit(overloaded{
                 [&](const cost::AbsDistance&) {
                   lipschitz_ = grid_lipschitz([](double) { return 1.0; }, diam);
                 },
                 [&](const cost::PowerDistance& p) {
                   if (!(p.p >= 1.0)) throw InvalidArgument("PowerDistance requires p >= 1");
                   lipschitz_ = grid_lipschitz(
                       [&](double r) { return p.p * std::pow(r, p.p - 1.0); }, diam);
                 },
                 [&](const cost::NegatedKernel& k) {
                   if (!k.kernel) throw InvalidArgument("NegatedKernel requires a kernel");
                   if (k.kernel->dim() != dim_) throw DimensionMismatch("kernel/box dimension");
                   lipschitz_ = k.kernel->lipschitz();
                 },
             },
             variant_);
}

Cost Cost::negated(const Kernel& k, const BoundingBox& box) {
  return Cost(cost::NegatedKernel{std::make_shared<const Kernel>(k)}, box);
}

double Cost::operator()(ConstPoint x, ConstPoint y) const {
  return std::visit(
      overloaded{
          [&](const cost::AbsDistance&) { return std::sqrt(squared_distance(x, y)); },
          [&](const cost::PowerDistance& p) {
            return std::pow(std::sqrt(squared_distance(x, y)), p.p);
          },
          [&](const cost::NegatedKernel& k) { return -(*k.kernel)(x, y); },
      },
      variant_);
}

void Cost::add_gradient(ConstPoint x, ConstPoint y, double scale, std::span<double> out) const {
  std::visit(overloaded{
                 [&](const cost::AbsDistance&) {
                   const double r = std::sqrt(squared_distance(x, y));
                   if (r == 0.0) {
                     throw NonDifferentiablePoint("AbsDistance is not differentiable at x == y");
                   }
                   for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * (y[k] - x[k]) / r;
                 },
                 [&](const cost::PowerDistance& p) {
                   const double r = std::sqrt(squared_distance(x, y));
                   if (r == 0.0) {
                     if (p.p > 1.0) return;
                     throw NonDifferentiablePoint("PowerDistance(1) is not differentiable at x == y");
                   }
                   const double f = p.p * std::pow(r, p.p - 2.0);
                   for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * f * (y[k] - x[k]);
                 },
                 [&](const cost::NegatedKernel& k) { k.kernel->add_gradient(x, y, -scale, out); },
             },
             variant_);
}

std::vector<double> Cost::gradient(ConstPoint x, ConstPoint y) const {
  std::vector<double> g(y.size(), 0.0);
  add_gradient(x, y, 1.0, g);
  return g;
}

std::string Cost::name() const {
  return std::visit(overloaded{
                        [](const cost::AbsDistance&) { return std::string("AbsDistance"); },
                        [](const cost::PowerDistance&) { return std::string("PowerDistance"); },
                        [](const cost::NegatedKernel& k) {
                          return "NegatedKernel(" + k.kernel->name() + ")";
                        },
                    },
                    variant_);
}

const Kernel* Cost::kernel() const {
  if (const auto* k = std::get_if<cost::NegatedKernel>(&variant_)) return k->kernel.get();
  return nullptr;
}

Matrix cost_matrix(const Cost& c, const PointCloud& xs, const PointCloud& ys) {
  Matrix m(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) m(i, j) = c(xs[i], ys[j]);
  }
  return m;
}

}  // namespace sinkdiv
