#include "ckmo/metric.hpp"

#include <cmath>
#include <sstream>

namespace ckmo {

MetricSpace MetricSpace::from_points(Eigen::MatrixXd points,
                                     int materialize_threshold) {
  MetricSpace ms;
  ms.size_ = static_cast<int>(points.rows());
  ms.points_ = std::move(points);
  ms.coord_ = true;
  if (ms.size_ <= materialize_threshold) {
    const int n = ms.size_;
    // ||x-y||^2 = ||x||^2 + ||y||^2 - 2 x.y, then a sqrt pass; the clamp
    // kills the tiny negatives that cancellation produces on the diagonal.
    Eigen::VectorXd sq = ms.points_.rowwise().squaredNorm();
    Eigen::MatrixXd g = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                        2.0 * (ms.points_ * ms.points_.transpose());
    ms.dist_ = g.cwiseMax(0.0).cwiseSqrt();
    ms.dist_.diagonal().setZero();
    ms.materialized_ = true;
  }
  return ms;
}

MetricSpace MetricSpace::from_matrix(Eigen::MatrixXd distances) {
  MetricSpace ms;
  ms.size_ = static_cast<int>(distances.rows());
  ms.dist_ = std::move(distances);
  ms.coord_ = false;
  ms.materialized_ = true;
  return ms;
}

std::vector<std::string> MetricSpace::validate(
    int triangle_check_limit) const {
  std::vector<std::string> out;
  const int n = size_;
  if (!coord_ && dist_.rows() != dist_.cols()) {
    out.push_back("distance matrix is not square");
    return out;
  }
  if (coord_ && !materialized_) return out;  // Euclidean by construction
  const double scale = std::max(1.0, dist_.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  for (int i = 0; i < n; ++i) {
    if (std::abs(dist_(i, i)) > tol) {
      std::ostringstream os;
      os << "nonzero diagonal at " << i << ": " << dist_(i, i);
      out.push_back(os.str());
    }
    for (int j = i + 1; j < n; ++j) {
      if (dist_(i, j) < -tol) {
        std::ostringstream os;
        os << "negative distance (" << i << "," << j << "): " << dist_(i, j);
        out.push_back(os.str());
      }
      if (std::abs(dist_(i, j) - dist_(j, i)) > tol) {
        std::ostringstream os;
        os << "asymmetry (" << i << "," << j << "): " << dist_(i, j)
           << " vs " << dist_(j, i);
        out.push_back(os.str());
      }
      if (static_cast<int>(out.size()) > 16) return out;
    }
  }
  if (coord_) return out;  // triangle inequality holds in coordinate mode
  const int lim = std::min(n, triangle_check_limit);
  for (int i = 0; i < lim; ++i)
    for (int j = 0; j < lim; ++j)
      for (int l = 0; l < lim; ++l)
        if (dist_(i, j) > dist_(i, l) + dist_(l, j) + tol) {
          std::ostringstream os;
          os << "triangle violation: d(" << i << "," << j << ")="
             << dist_(i, j) << " > d(" << i << "," << l << ")+d(" << l << ","
             << j << ")=" << dist_(i, l) + dist_(l, j);
          out.push_back(os.str());
          if (static_cast<int>(out.size()) > 16) return out;
        }
  return out;
}

}  // namespace ckmo
