#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sinkdiv/divergence.hpp"
#include "sinkdiv/kernels.hpp"
#include "sinkdiv/measures.hpp"

namespace sinkdiv {

inline constexpr double kDefaultSmoothing = 1e-2;

struct DitherConfig {
  DitherConfig(BoundingBox box, Cost cost) : box(std::move(box)), cost(std::move(cost)) {}

  // Cost c = sqrt(smoothing^2 + |x - y|^2), i.e. the negated smoothed distance kernel.
  static DitherConfig smoothed_distance(const BoundingBox& box, double smoothing = kDefaultSmoothing);

  BoundingBox box;
  Cost cost;
  std::size_t atoms = 50;
  double epsilon = kInfiniteEpsilon;
  std::size_t max_outer_iter = 500;
  double grad_tol = 1e-6;
  double initial_step = 1.0;
  double max_step = 1e6;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-14;
  std::uint64_t seed = 0;
  double inner_tol = 1e-9;
  std::size_t inner_max_iter = 20000;

  void check() const;
  SinkhornConfig inner_config() const;
};

struct TraceEntry {
  std::size_t iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct DitherState {
  PointCloud positions;
  double energy = 0.0;
  std::vector<double> grad;  // atoms x dim, row-major
  std::vector<TraceEntry> trace;
  bool converged = false;
  bool line_search_failure = false;
  bool inner_not_converged = false;
  std::vector<std::string> warnings;
};

// S_eps(target, uniform measure on positions), with the target's self term
// computed once. Inner Sinkhorn solves are warm-started from the previous call.
class DitherObjective {
 public:
  DitherObjective(DitherConfig cfg, DiscreteMeasure target);

  double value(const PointCloud& positions);
  double value_and_gradient(const PointCloud& positions, std::vector<double>& grad);

  const DitherConfig& config() const { return cfg_; }
  void set_inner_tol(double tol) { cfg_.inner_tol = tol; }
  bool inner_not_converged() const { return inner_not_converged_; }

 private:
  double evaluate(const PointCloud& positions, std::vector<double>* grad);
  double evaluate_infinite(const PointCloud& positions, std::vector<double>* grad) const;
  double evaluate_finite(const PointCloud& positions, std::vector<double>* grad);

  DitherConfig cfg_;
  DiscreteMeasure target_;
  double target_self_ = 0.0;
  std::vector<double> warm_cross_;
  std::vector<double> warm_self_;
  bool inner_not_converged_ = false;
};

DiscreteMeasure empirical_measure(const PointCloud& positions);

double objective(const DitherConfig& cfg, const DiscreteMeasure& target, const PointCloud& positions);
std::vector<double> gradient(const DitherConfig& cfg, const DiscreteMeasure& target,
                             const PointCloud& positions);

// Relative sup-norm error of the analytic gradient against central differences.
double gradient_fd_error(const DitherConfig& cfg, const DiscreteMeasure& target,
                         const PointCloud& positions, double h = 1e-5);

PointCloud random_positions(const BoundingBox& box, std::size_t count, std::uint64_t seed);

// Projected gradient descent with Armijo backtracking from random positions.
DitherState dither(const DitherConfig& cfg, const DiscreteMeasure& target);
DitherState dither(const DitherConfig& cfg, const DiscreteMeasure& target, PointCloud initial);

}  // namespace sinkdiv
