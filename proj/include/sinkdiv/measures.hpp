#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sinkdiv {

using ConstPoint = std::span<const double>;

// Ordered list of points in R^d, stored row-major in one buffer.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dim, std::vector<double> coords);

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }

  ConstPoint operator[](std::size_t i) const {
    return ConstPoint(coords_.data() + i * dim_, dim_);
  }
  std::span<double> mutable_point(std::size_t i) {
    return std::span<double>(coords_.data() + i * dim_, dim_);
  }

  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& coords() { return coords_; }

  void push_back(ConstPoint p);

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

class BoundingBox {
 public:
  // Throws InvalidArgument unless lower < upper componentwise.
  BoundingBox(std::vector<double> lower, std::vector<double> upper);

  static BoundingBox cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double diameter() const { return diameter_; }

  bool contains(ConstPoint p) const;
  void project(std::span<double> p) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double diameter_ = 0.0;
};

// Weighted point cloud. The plain constructor stores weights verbatim (so that
// validate() can report what was wrong); normalized() divides by the weight
// sum exactly once.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(PointCloud points, std::vector<double> weights);

  static DiscreteMeasure normalized(PointCloud points, std::vector<double> weights);
  static DiscreteMeasure uniform(PointCloud points);
  static DiscreteMeasure dirac(std::vector<double> point);

  std::size_t dim() const { return points_.dim(); }
  std::size_t size() const { return weights_.size(); }
  const PointCloud& points() const { return points_; }
  ConstPoint point(std::size_t i) const { return points_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

 private:
  PointCloud points_;
  std::vector<double> weights_;
};

inline constexpr double kWeightSumTolerance = 1e-12;

// Returns m unchanged when every invariant holds, throws otherwise.
const DiscreteMeasure& validate(const DiscreteMeasure& m, const BoundingBox& box);

// Sum mu_j log(mu_j / nu_j) with 0 log 0 = 0; +inf when nu_j = 0 < mu_j.
double kl_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

double tv_norm(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Atoms (x_i, y_j) with weight mu_i nu_j, i outer.
DiscreteMeasure product_measure(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

using DensityFn = std::function<double(ConstPoint)>;

// Nodes of a regular n^d grid spanning the box (corners included; n = 1 gives
// the centre), weights proportional to f(node). Last axis varies fastest.
DiscreteMeasure sample_grid_density(const DensityFn& f, const BoundingBox& box,
                                    std::size_t n_per_axis);

PointCloud grid_points(const BoundingBox& box, std::size_t n_per_axis);

double euclidean_distance(ConstPoint x, ConstPoint y);

// Text format: one atom per line "weight,x1,...,xd"; '#' lines are comments.
DiscreteMeasure read_measure(std::istream& in);
DiscreteMeasure read_measure_file(const std::string& path);
void write_measure(std::ostream& out, const DiscreteMeasure& m);

// Same layout with an arbitrary value column in place of the weight.
void write_values(std::ostream& out, const PointCloud& points,
                  std::span<const double> values);

// Writes through a temporary file and renames it into place.
void write_file_atomically(const std::string& path,
                           const std::function<void(std::ostream&)>& body);

}  // namespace sinkdiv
