#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace ckmo {

// Finite metric over point ids 0..size()-1. Two storage modes:
//  - coordinate mode: rows of `points()` are Euclidean coordinates; small
//    spaces materialize the full distance matrix once, large ones compute
//    distances on demand;
//  - matrix mode: an explicit symmetric distance matrix.
class MetricSpace {
 public:
  static constexpr int kDefaultMaterializeThreshold = 512;

  static MetricSpace from_points(Eigen::MatrixXd points,
                                 int materialize_threshold =
                                     kDefaultMaterializeThreshold);
  static MetricSpace from_matrix(Eigen::MatrixXd distances);

  int size() const { return size_; }
  bool coordinate_mode() const { return coord_; }

  double distance(int i, int j) const {
    if (materialized_) return dist_(i, j);
    return (points_.row(i) - points_.row(j)).norm();
  }

  // Coordinate mode only (0x0 in matrix mode).
  const Eigen::MatrixXd& points() const { return points_; }

  // Returns human-readable violations: negative entries, asymmetry,
  // nonzero diagonal, triangle inequality (sampled beyond
  // triangle_check_limit points). Empty means valid.
  std::vector<std::string> validate(int triangle_check_limit = 128) const;

 private:
  Eigen::MatrixXd points_;
  Eigen::MatrixXd dist_;
  bool coord_ = false;
  bool materialized_ = false;
  int size_ = 0;
};

using MetricPtr = std::shared_ptr<const MetricSpace>;

}  // namespace ckmo
