#include "sinkdiv/dither.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sinkdiv/errors.hpp"

namespace sinkdiv {

DitherConfig DitherConfig::smoothed_distance(const BoundingBox& box, double smoothing) {
  const Kernel k(kernel::SmoothedNegativeDistance{smoothing}, box);
  return DitherConfig(box, Cost::negated(k, box));
}

void DitherConfig::check() const {
  if (atoms == 0) throw InvalidArgument("dither needs at least one atom");
  if (!(epsilon > 0.0)) throw InvalidArgument("dither epsilon must be positive or inf");
  if (cost.dim() != box.dim()) throw DimensionMismatch("dither cost and box dimensions differ");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidArgument("backtrack must lie in (0,1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw InvalidArgument("armijo constant must lie in (0,1)");
  if (!(initial_step > 0.0)) throw InvalidArgument("initial_step must be positive");
  if (!(grad_tol >= 0.0)) throw InvalidArgument("grad_tol must be non-negative");
}

SinkhornConfig DitherConfig::inner_config() const {
  SinkhornConfig c;
  c.epsilon = epsilon;
  c.tol = inner_tol;
  c.max_iter = inner_max_iter;
  c.normalize = true;
  return c;
}

DiscreteMeasure empirical_measure(const PointCloud& positions) {
  return DiscreteMeasure::uniform(positions);
}

DitherObjective::DitherObjective(DitherConfig cfg, DiscreteMeasure target)
    : cfg_(std::move(cfg)), target_(std::move(target)) {
  cfg_.check();
  if (target_.dim() != cfg_.box.dim()) throw DimensionMismatch("dither target dimension");
  if (std::isinf(cfg_.epsilon)) {
    const KernelFunction k = [this](ConstPoint x, ConstPoint y) { return -cfg_.cost(x, y); };
    target_self_ = kernel_double_sum(k, target_, target_);
  } else {
    const SinkhornSolution self = solve_symmetric(cfg_.cost, target_, cfg_.inner_config());
    if (!self.converged) inner_not_converged_ = true;
    target_self_ = self.value;
  }
}

double DitherObjective::value(const PointCloud& positions) { return evaluate(positions, nullptr); }

double DitherObjective::value_and_gradient(const PointCloud& positions, std::vector<double>& grad) {
  return evaluate(positions, &grad);
}

double DitherObjective::evaluate(const PointCloud& positions, std::vector<double>* grad) {
  if (positions.dim() != target_.dim()) throw DimensionMismatch("dither positions dimension");
  if (positions.empty()) throw InvalidArgument("dither needs at least one position");
  if (grad != nullptr) grad->assign(positions.size() * positions.dim(), 0.0);
  return std::isinf(cfg_.epsilon) ? evaluate_infinite(positions, grad)
                                  : evaluate_finite(positions, grad);
}

// 1/2 D^2 for K = -c, expanded around the cached target self term.
double DitherObjective::evaluate_infinite(const PointCloud& positions,
                                          std::vector<double>* grad) const {
  const Cost& c = cfg_.cost;
  const std::size_t m = positions.size();
  const std::size_t d = positions.dim();
  const double inv_m = 1.0 / static_cast<double>(m);
  double pp = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < m; ++k) row += -c(positions[i], positions[k]);
    pp += row;
  }
  pp *= inv_m * inv_m;
  double tp = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t a = 0; a < target_.size(); ++a) s += target_.weight(a) * -c(target_.point(a), positions[i]);
    tp += s;
  }
  tp *= inv_m;
  if (grad != nullptr) {
    for (std::size_t j = 0; j < m; ++j) {
      std::span<double> g(grad->data() + j * d, d);
      for (std::size_t a = 0; a < target_.size(); ++a) {
        c.add_gradient(target_.point(a), positions[j], inv_m * target_.weight(a), g);
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (i != j) c.add_gradient(positions[i], positions[j], -inv_m * inv_m, g);
      }
    }
  }
  return 0.5 * (target_self_ + pp - 2.0 * tp);
}

// Envelope gradient at the converged potentials: only the explicit dependence
// of the cost on the positions is differentiated.
double DitherObjective::evaluate_finite(const PointCloud& positions, std::vector<double>* grad) {
  const Cost& c = cfg_.cost;
  const std::size_t m = positions.size();
  const std::size_t d = positions.dim();
  const std::vector<double> uniform(m, 1.0 / static_cast<double>(m));

  SinkhornConfig inner = cfg_.inner_config();
  if (warm_cross_.size() == m) inner.initial_psi = warm_cross_;
  const Matrix cross_cost = cost_matrix(c, target_.points(), positions);
  const SinkhornSolution cross = solve(cross_cost, target_.weights(), uniform, inner);

  inner.initial_psi.clear();
  if (warm_self_.size() == m) inner.initial_psi = warm_self_;
  const Matrix self_cost = cost_matrix(c, positions, positions);
  const SinkhornSolution self = solve_symmetric(self_cost, uniform, inner);

  warm_cross_ = cross.potentials.psi;
  // symmetric potential before the normalization split
  warm_self_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    warm_self_[i] = 0.5 * (self.potentials.phi[i] + self.potentials.psi[i]);
  }
  if (!cross.converged || !self.converged) inner_not_converged_ = true;

  if (grad != nullptr) {
    for (std::size_t j = 0; j < m; ++j) {
      std::span<double> g(grad->data() + j * d, d);
      for (std::size_t a = 0; a < target_.size(); ++a) {
        const double p = cross.plan(a, j);
        if (p != 0.0) c.add_gradient(target_.point(a), positions[j], p, g);
      }
      for (std::size_t k = 0; k < m; ++k) {
        const double p = self.plan(k, j);
        if (k != j && p != 0.0) c.add_gradient(positions[k], positions[j], -p, g);
      }
    }
  }
  return cross.value - 0.5 * target_self_ - 0.5 * self.value;
}

double objective(const DitherConfig& cfg, const DiscreteMeasure& target, const PointCloud& positions) {
  DitherObjective obj(cfg, target);
  return obj.value(positions);
}

std::vector<double> gradient(const DitherConfig& cfg, const DiscreteMeasure& target,
                             const PointCloud& positions) {
  DitherObjective obj(cfg, target);
  std::vector<double> g;
  obj.value_and_gradient(positions, g);
  return g;
}

double gradient_fd_error(const DitherConfig& cfg, const DiscreteMeasure& target,
                         const PointCloud& positions, double h) {
  const std::vector<double> g = gradient(cfg, target, positions);
  std::vector<double> fd(g.size(), 0.0);
  for (std::size_t t = 0; t < g.size(); ++t) {
    PointCloud plus = positions;
    PointCloud minus = positions;
    plus.coords()[t] += h;
    minus.coords()[t] -= h;
    fd[t] = (objective(cfg, target, plus) - objective(cfg, target, minus)) / (2.0 * h);
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < g.size(); ++t) {
    num = std::max(num, std::abs(g[t] - fd[t]));
    den = std::max(den, std::abs(fd[t]));
  }
  return den > 0.0 ? num / den : num;
}

PointCloud random_positions(const BoundingBox& box, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> coords;
  coords.reserve(count * box.dim());
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t a = 0; a < box.dim(); ++a) {
      std::uniform_real_distribution<double> u(box.lower()[a], box.upper()[a]);
      coords.push_back(u(rng));
    }
  }
  return PointCloud(box.dim(), std::move(coords));
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// |P(p - g) - p|_inf, the stationarity measure for the box-constrained problem.
double projected_gradient_norm(const BoundingBox& box, const PointCloud& p,
                               const std::vector<double>& g) {
  const std::size_t d = p.dim();
  double s = 0.0;
  for (std::size_t t = 0; t < g.size(); ++t) {
    const std::size_t axis = t % d;
    const double moved = std::clamp(p.coords()[t] - g[t], box.lower()[axis], box.upper()[axis]);
    s = std::max(s, std::abs(moved - p.coords()[t]));
  }
  return s;
}

PointCloud projected_step(const BoundingBox& box, const PointCloud& p, const std::vector<double>& g,
                          double t) {
  PointCloud out = p;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto x = out.mutable_point(i);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] -= t * g[i * x.size() + a];
    box.project(x);
  }
  return out;
}

}  // namespace

DitherState dither(const DitherConfig& cfg, const DiscreteMeasure& target) {
  return dither(cfg, target, random_positions(cfg.box, cfg.atoms, cfg.seed));
}

DitherState dither(const DitherConfig& cfg, const DiscreteMeasure& target, PointCloud initial) {
  cfg.check();
  if (initial.size() != cfg.atoms || initial.dim() != cfg.box.dim()) {
    throw DimensionMismatch("initial positions do not match the configured atom count");
  }
  DitherState state;
  if (target.size() < 10 * cfg.atoms) {
    state.warnings.push_back("target has fewer than 10x as many atoms as the dithered measure; "
                             "expect clustering on target atoms");
  }
  for (std::size_t i = 0; i < initial.size(); ++i) cfg.box.project(initial.mutable_point(i));

  DitherObjective obj(cfg, target);
  state.positions = std::move(initial);
  state.energy = obj.value_and_gradient(state.positions, state.grad);

  if (!std::isinf(cfg.epsilon)) {
    // Directional finite-difference check of the envelope gradient; tighten
    // the inner tolerance once if it is off.
    const double gnorm = sup_norm(state.grad);
    if (gnorm > 0.0) {
      const double h = 1e-5 / gnorm;
      const PointCloud plus = projected_step(cfg.box, state.positions, state.grad, -h);
      const PointCloud minus = projected_step(cfg.box, state.positions, state.grad, h);
      const double fd = (obj.value(plus) - obj.value(minus)) / (2.0 * h);
      double expected = 0.0;
      for (double x : state.grad) expected += x * x;
      if (std::abs(fd - expected) > 1e-4 * std::abs(expected)) {
        obj.set_inner_tol(0.1 * cfg.inner_tol);
        state.warnings.push_back("gradient check failed at setup; inner tolerance tightened");
        state.energy = obj.value_and_gradient(state.positions, state.grad);
      }
    }
  }

  double gnorm = projected_gradient_norm(cfg.box, state.positions, state.grad);
  state.trace.push_back({0, state.energy, gnorm, 0.0});
  double step = cfg.initial_step;
  std::vector<double> trial_grad;
  for (std::size_t it = 1; it <= cfg.max_outer_iter; ++it) {
    if (gnorm <= cfg.grad_tol) {
      state.converged = true;
      break;
    }
    double t = step;
    bool accepted = false;
    PointCloud trial;
    double trial_energy = 0.0;
    while (t >= cfg.min_step) {
      trial = projected_step(cfg.box, state.positions, state.grad, t);
      double decrease = 0.0;  // <g, trial - p>
      for (std::size_t k = 0; k < trial.coords().size(); ++k) {
        decrease += state.grad[k] * (trial.coords()[k] - state.positions.coords()[k]);
      }
      if (decrease == 0.0) break;
      trial_energy = obj.value_and_gradient(trial, trial_grad);
      if (trial_energy <= state.energy + cfg.armijo * decrease) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      state.line_search_failure = true;
      break;
    }
    state.positions = std::move(trial);
    state.energy = trial_energy;
    state.grad.swap(trial_grad);
    gnorm = projected_gradient_norm(cfg.box, state.positions, state.grad);
    state.trace.push_back({it, state.energy, gnorm, t});
    step = std::min(2.0 * t, cfg.max_step);
  }
  if (!state.converged && gnorm <= cfg.grad_tol) state.converged = true;
  state.inner_not_converged = obj.inner_not_converged();
  return state;
}

}  // namespace sinkdiv
