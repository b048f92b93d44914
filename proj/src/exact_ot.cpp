#include "sinkdiv/exact_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sinkdiv/errors.hpp"

namespace sinkdiv {

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> s(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) s[i] += (*this)(i, j);
  }
  return s;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> s(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) s[j] += (*this)(i, j);
  }
  return s;
}

double TransportPlan::max_marginal_error(std::span<const double> mu,
                                         std::span<const double> nu) const {
  double err = 0.0;
  const auto r = row_sums();
  const auto c = col_sums();
  for (std::size_t i = 0; i < rows; ++i) err = std::max(err, std::abs(r[i] - mu[i]));
  for (std::size_t j = 0; j < cols; ++j) err = std::max(err, std::abs(c[j] - nu[j]));
  return err;
}

double plan_cost(const Matrix& cost, const TransportPlan& plan) {
  double v = 0.0;
  for (std::size_t i = 0; i < plan.rows; ++i) {
    for (std::size_t j = 0; j < plan.cols; ++j) v += cost(i, j) * plan(i, j);
  }
  return v;
}

double wasserstein1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) throw DimensionMismatch("wasserstein1_1d needs 1-d measures");
  struct Event {
    double x;
    double dw;
  };
  std::vector<Event> events;
  events.reserve(mu.size() + nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) events.push_back({mu.point(i)[0], mu.weight(i)});
  for (std::size_t j = 0; j < nu.size(); ++j) events.push_back({nu.point(j)[0], -nu.weight(j)});
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.x < b.x; });
  double cdf_diff = 0.0;
  double total = 0.0;
  for (std::size_t e = 0; e < events.size(); ++e) {
    cdf_diff += events[e].dw;
    if (e + 1 < events.size()) total += std::abs(cdf_diff) * (events[e + 1].x - events[e].x);
  }
  return total;
}

namespace {

// Basis of the transportation problem as a spanning tree on n row nodes and
// m column nodes (column j is node n + j).
class TransportationSimplex {
 public:
  TransportationSimplex(const Matrix& cost, std::span<const double> supply,
                        std::span<const double> demand)
      : cost_(cost), n_(cost.rows), m_(cost.cols), supply_(supply), demand_(demand) {}

  ExactOTResult run() {
    initial_basis();
    ExactOTResult result;
    const double scale = cost_scale();
    const double tol = 1e-12 * std::max(1.0, scale);
    std::vector<double> u, v;
    const std::size_t max_pivots = 50 * (n_ + m_) * (n_ + m_) + 1000;
    for (;;) {
      compute_duals(u, v);
      double best = -tol;
      std::size_t ei = n_, ej = m_;
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < m_; ++j) {
          const double r = cost_(i, j) - u[i] - v[j];
          if (r < best) {
            best = r;
            ei = i;
            ej = j;
          }
        }
      }
      if (ei == n_) break;
      pivot(ei, ej);
      if (++result.pivots > max_pivots) throw Error("transportation simplex did not terminate");
    }

    // Re-solve the optimal basis with the unperturbed marginals.
    const std::vector<double> flows = tree_flows(supply_, demand_);
    result.plan.rows = n_;
    result.plan.cols = m_;
    result.plan.entries.assign(n_ * m_, 0.0);
    for (std::size_t e = 0; e < basis_.size(); ++e) {
      const auto [i, j] = basis_[e];
      result.plan.entries[i * m_ + j] = std::max(flows[e], 0.0);
    }
    result.value = plan_cost(cost_, result.plan);
    result.phi = std::move(u);
    result.psi = std::move(v);
    return result;
  }

 private:
  double cost_scale() const {
    double s = 0.0;
    for (double c : cost_.data) s = std::max(s, std::abs(c));
    return s;
  }

  // North-west corner rule on marginals perturbed so that no basic solution
  // is degenerate: every supply gains delta, the last demand gains n * delta.
  void initial_basis() {
    perturbed_supply_.assign(supply_.begin(), supply_.end());
    perturbed_demand_.assign(demand_.begin(), demand_.end());
    for (double& a : perturbed_supply_) a += kPerturbation;
    perturbed_demand_.back() += kPerturbation * static_cast<double>(n_);

    basis_.clear();
    flow_.clear();
    std::size_t i = 0, j = 0;
    double sa = perturbed_supply_[0], sb = perturbed_demand_[0];
    for (;;) {
      const double x = std::min(sa, sb);
      basis_.push_back({i, j});
      flow_.push_back(x);
      sa -= x;
      sb -= x;
      if (i + 1 == n_ && j + 1 == m_) break;
      if (j + 1 == m_ || (i + 1 < n_ && sa <= sb)) {
        ++i;
        sa = perturbed_supply_[i];
      } else {
        ++j;
        sb = perturbed_demand_[j];
      }
    }
  }

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency() const {
    // node -> (neighbour node, basis edge index)
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n_ + m_);
    for (std::size_t e = 0; e < basis_.size(); ++e) {
      const auto [i, j] = basis_[e];
      adj[i].push_back({n_ + j, e});
      adj[n_ + j].push_back({i, e});
    }
    return adj;
  }

  void compute_duals(std::vector<double>& u, std::vector<double>& v) const {
    u.assign(n_, 0.0);
    v.assign(m_, 0.0);
    const auto adj = adjacency();
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (const auto& [b, e] : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        const auto [i, j] = basis_[e];
        if (b >= n_) {
          v[j] = cost_(i, j) - u[i];
        } else {
          u[i] = cost_(i, j) - v[j];
        }
        stack.push_back(b);
      }
    }
  }

  void pivot(std::size_t ei, std::size_t ej) {
    // Tree path from column node ej back to row node ei closes the cycle.
    const auto adj = adjacency();
    const std::size_t start = ei;
    const std::size_t goal = n_ + ej;
    std::vector<std::size_t> parent_edge(n_ + m_, kNone);
    std::vector<std::size_t> parent(n_ + m_, kNone);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty() && !seen[goal]) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (const auto& [b, e] : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        parent[b] = a;
        parent_edge[b] = e;
        stack.push_back(b);
      }
    }
    // Edges along goal -> start; the first one (touching column ej) loses flow.
    std::vector<std::size_t> path;
    for (std::size_t node = goal; node != start; node = parent[node]) path.push_back(parent_edge[node]);

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const std::size_t e = path[k];
      if (flow_[e] < theta || (flow_[e] == theta && e < leaving)) {
        theta = flow_[e];
        leaving = e;
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      flow_[path[k]] += (k % 2 == 0) ? -theta : theta;
    }
    basis_[leaving] = {ei, ej};
    flow_[leaving] = theta;
  }

  // Basic flows for the given marginals by peeling leaves off the tree.
  std::vector<double> tree_flows(std::span<const double> supply,
                                 std::span<const double> demand) const {
    std::vector<double> remaining(n_ + m_);
    for (std::size_t i = 0; i < n_; ++i) remaining[i] = supply[i];
    for (std::size_t j = 0; j < m_; ++j) remaining[n_ + j] = demand[j];
    const auto adj = adjacency();
    std::vector<std::size_t> degree(n_ + m_);
    for (std::size_t a = 0; a < n_ + m_; ++a) degree[a] = adj[a].size();
    std::vector<char> edge_done(basis_.size(), 0);
    std::vector<double> flows(basis_.size(), 0.0);
    std::vector<std::size_t> leaves;
    for (std::size_t a = 0; a < n_ + m_; ++a) {
      if (degree[a] == 1) leaves.push_back(a);
    }
    while (!leaves.empty()) {
      const std::size_t a = leaves.back();
      leaves.pop_back();
      if (degree[a] != 1) continue;
      for (const auto& [b, e] : adj[a]) {
        if (edge_done[e]) continue;
        edge_done[e] = 1;
        flows[e] = remaining[a];
        remaining[b] -= remaining[a];
        remaining[a] = 0.0;
        --degree[a];
        if (--degree[b] == 1) leaves.push_back(b);
        break;
      }
    }
    return flows;
  }

  static constexpr double kPerturbation = 1e-12;
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  const Matrix& cost_;
  std::size_t n_;
  std::size_t m_;
  std::span<const double> supply_;
  std::span<const double> demand_;
  std::vector<double> perturbed_supply_;
  std::vector<double> perturbed_demand_;
  std::vector<std::pair<std::size_t, std::size_t>> basis_;
  std::vector<double> flow_;
};

}  // namespace

ExactOTResult exact_ot(const Matrix& cost, std::span<const double> supply,
                       std::span<const double> demand) {
  if (cost.rows != supply.size() || cost.cols != demand.size()) {
    throw DimensionMismatch("exact_ot: cost matrix shape does not match the marginals");
  }
  if (cost.rows == 0 || cost.cols == 0) throw ZeroMass("exact_ot: empty marginal");
  if (cost.rows * cost.cols > kExactOTMaxCells) {
    throw SizeExceeded("exact_ot: " + std::to_string(cost.rows) + "x" + std::to_string(cost.cols) +
                       " exceeds the cell cap");
  }
  return TransportationSimplex(cost, supply, demand).run();
}

ExactOTResult exact_ot(const Cost& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw DimensionMismatch("exact_ot: measure dimensions differ");
  if (mu.size() * nu.size() > kExactOTMaxCells) {
    throw SizeExceeded("exact_ot: instance exceeds the cell cap");
  }
  const Matrix c = cost_matrix(cost, mu.points(), nu.points());
  return exact_ot(c, mu.weights(), nu.weights());
}

double dual_feasibility_check(const Cost& cost, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, std::span<const double> phi,
                              std::span<const double> psi) {
  if (phi.size() != mu.size() || psi.size() != nu.size()) {
    throw DimensionMismatch("dual_feasibility_check: potential sizes do not match supports");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      worst = std::max(worst, phi[i] + psi[j] - cost(mu.point(i), nu.point(j)));
    }
  }
  return worst;
}

}  // namespace sinkdiv
