#include "sinkdiv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sinkdiv/errors.hpp"

namespace sinkdiv {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) {
    if (!coords_.empty()) throw DimensionMismatch("point cloud with dim 0 has coordinates");
    return;
  }
  if (coords_.size() % dim_ != 0) {
    throw DimensionMismatch("coordinate count " + std::to_string(coords_.size()) +
                            " is not a multiple of dim " + std::to_string(dim_));
  }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw DimensionMismatch("ragged point list");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointCloud(dim, std::move(coords));
}

void PointCloud::push_back(ConstPoint p) {
  if (dim_ == 0 && coords_.empty()) dim_ = p.size();
  if (p.size() != dim_) throw DimensionMismatch("push_back: wrong point dimension");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

BoundingBox::BoundingBox(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw InvalidArgument("bounding box needs matching, non-empty corner vectors");
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!(lower_[k] < upper_[k])) {
      throw InvalidArgument("bounding box requires lower < upper in every axis");
    }
    const double w = upper_[k] - lower_[k];
    sq += w * w;
  }
  diameter_ = std::sqrt(sq);
  if (!std::isfinite(diameter_)) throw InvalidArgument("bounding box diameter is not finite");
}

BoundingBox BoundingBox::cube(std::size_t dim, double lo, double hi) {
  return BoundingBox(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

bool BoundingBox::contains(ConstPoint p) const {
  if (p.size() != dim()) return false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= lower_[k] && p[k] <= upper_[k])) return false;
  }
  return true;
}

void BoundingBox::project(std::span<double> p) const {
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::clamp(p[k], lower_[k], upper_[k]);
}

DiscreteMeasure::DiscreteMeasure(PointCloud points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size()) {
    throw DimensionMismatch("measure has " + std::to_string(points_.size()) + " points but " +
                            std::to_string(weights_.size()) + " weights");
  }
}

DiscreteMeasure DiscreteMeasure::normalized(PointCloud points, std::vector<double> weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0 || std::isnan(weights[i])) {
      throw NegativeWeight("weight " + std::to_string(i) + " is negative");
    }
    sum += weights[i];
  }
  if (!(sum > 0.0)) throw ZeroMass("measure has zero total mass");
  for (double& w : weights) w /= sum;
  return DiscreteMeasure(std::move(points), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::uniform(PointCloud points) {
  const std::size_t n = points.size();
  if (n == 0) throw ZeroMass("uniform measure on an empty point set");
  return DiscreteMeasure(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure DiscreteMeasure::dirac(std::vector<double> point) {
  const std::size_t d = point.size();
  return DiscreteMeasure(PointCloud(d, std::move(point)), {1.0});
}

const DiscreteMeasure& validate(const DiscreteMeasure& m, const BoundingBox& box) {
  if (m.dim() != box.dim()) {
    throw DimensionMismatch("measure dim " + std::to_string(m.dim()) + " vs box dim " +
                            std::to_string(box.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.weight(i) < 0.0 || std::isnan(m.weight(i))) {
      throw NegativeWeight("weight " + std::to_string(i) + " is negative");
    }
    sum += m.weight(i);
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os << std::setprecision(17) << "weights sum to " << sum;
    throw WeightSumDeviation(os.str());
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!box.contains(m.point(i))) {
      throw PointOutsideBox("atom " + std::to_string(i) + " lies outside the bounding box");
    }
  }
  return m;
}

namespace {

void require_same_support(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim() || !(mu.points() == nu.points())) {
    throw SupportMismatch("measures do not share the same support list");
  }
}

}  // namespace

double kl_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_support(mu, nu);
  double sum = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double a = mu.weight(j);
    const double b = nu.weight(j);
    if (a == 0.0) continue;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    sum += a * std::log(a / b);
  }
  return std::max(sum, 0.0);
}

double tv_norm(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_support(mu, nu);
  double sum = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) sum += std::abs(mu.weight(j) - nu.weight(j));
  return sum;
}

DiscreteMeasure product_measure(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::size_t d = mu.dim() + nu.dim();
  std::vector<double> coords;
  coords.reserve(mu.size() * nu.size() * d);
  std::vector<double> weights;
  weights.reserve(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      auto x = mu.point(i);
      auto y = nu.point(j);
      coords.insert(coords.end(), x.begin(), x.end());
      coords.insert(coords.end(), y.begin(), y.end());
      weights.push_back(mu.weight(i) * nu.weight(j));
    }
  }
  return DiscreteMeasure(PointCloud(d, std::move(coords)), std::move(weights));
}

PointCloud grid_points(const BoundingBox& box, std::size_t n_per_axis) {
  if (n_per_axis == 0) throw InvalidArgument("grid needs at least one node per axis");
  const std::size_t d = box.dim();
  std::vector<std::vector<double>> axes(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double lo = box.lower()[k];
    const double hi = box.upper()[k];
    if (n_per_axis == 1) {
      axes[k].push_back(0.5 * (lo + hi));
      continue;
    }
    const double h = (hi - lo) / static_cast<double>(n_per_axis - 1);
    for (std::size_t t = 0; t < n_per_axis; ++t) {
      axes[k].push_back(std::clamp(lo + h * static_cast<double>(t), lo, hi));
    }
  }
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= n_per_axis;
  std::vector<double> coords;
  coords.reserve(total * d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t node = 0; node < total; ++node) {
    for (std::size_t k = 0; k < d; ++k) coords.push_back(axes[k][idx[k]]);
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < n_per_axis) break;
      idx[k] = 0;
    }
  }
  return PointCloud(d, std::move(coords));
}

DiscreteMeasure sample_grid_density(const DensityFn& f, const BoundingBox& box,
                                    std::size_t n_per_axis) {
  PointCloud nodes = grid_points(box, n_per_axis);
  std::vector<double> weights(nodes.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = f(nodes[i]);
    if (v < 0.0 || std::isnan(v)) throw NegativeWeight("density is negative at a grid node");
    weights[i] = v;
    sum += v;
  }
  if (!(sum > 0.0)) throw ZeroMass("density vanishes on every grid node");
  return DiscreteMeasure::normalized(std::move(nodes), std::move(weights));
}

double euclidean_distance(ConstPoint x, ConstPoint y) {
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = x[k] - y[k];
    sq += t * t;
  }
  return std::sqrt(sq);
}

DiscreteMeasure read_measure(std::istream& in) {
  std::string line;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::vector<double> coords;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stod(tok, &used));
        if (tok.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InvalidArgument("measure file line " + std::to_string(line_no) +
                              ": cannot parse '" + tok + "'");
      }
    }
    if (fields.size() < 2) {
      throw InvalidArgument("measure file line " + std::to_string(line_no) +
                            ": expected weight,x1,...,xd");
    }
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      throw DimensionMismatch("measure file line " + std::to_string(line_no) +
                              ": inconsistent dimension");
    }
    weights.push_back(fields[0]);
    coords.insert(coords.end(), fields.begin() + 1, fields.end());
  }
  if (weights.empty()) throw ZeroMass("measure file contains no atoms");
  return DiscreteMeasure::normalized(PointCloud(dim, std::move(coords)), std::move(weights));
}

DiscreteMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open measure file '" + path + "'");
  return read_measure(in);
}

void write_values(std::ostream& out, const PointCloud& points, std::span<const double> values) {
  if (values.size() != points.size()) throw DimensionMismatch("value count differs from point count");
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << values[i];
    for (double x : points[i]) out << ',' << x;
    out << '\n';
  }
  out.precision(old_precision);
}

void write_measure(std::ostream& out, const DiscreteMeasure& m) {
  write_values(out, m.points(), m.weights());
}

void write_file_atomically(const std::string& path,
                           const std::function<void(std::ostream&)>& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp + "'");
    body(out);
    out.flush();
    if (!out) throw InvalidArgument("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace sinkdiv
