#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sinkdiv/measures.hpp"

namespace sinkdiv::testing {

inline PointCloud random_cloud(std::mt19937_64& rng, const BoundingBox& box, std::size_t n) {
  std::vector<double> coords;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < box.dim(); ++a) {
      coords.push_back(std::uniform_real_distribution<double>(box.lower()[a], box.upper()[a])(rng));
    }
  }
  return PointCloud(box.dim(), std::move(coords));
}

// Weights bounded away from zero so that KL terms stay finite.
inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> w(n);
  for (double& x : w) x = u(rng);
  return w;
}

inline DiscreteMeasure random_measure(std::mt19937_64& rng, const BoundingBox& box, std::size_t n) {
  PointCloud pts = random_cloud(rng, box, n);
  return DiscreteMeasure::normalized(std::move(pts), random_weights(rng, n));
}

inline DiscreteMeasure line_measure(const std::vector<double>& xs, const std::vector<double>& w) {
  return DiscreteMeasure::normalized(PointCloud(1, xs), w);
}

// mu = delta_0/2 + delta_1/2, nu = delta_0.1/2 + delta_0.9/2 on [0, 1].
inline DiscreteMeasure toy_mu() { return line_measure({0.0, 1.0}, {0.5, 0.5}); }
inline DiscreteMeasure toy_nu() { return line_measure({0.1, 0.9}, {0.5, 0.5}); }
inline BoundingBox unit_interval() { return BoundingBox({0.0}, {1.0}); }

}  // namespace sinkdiv::testing
