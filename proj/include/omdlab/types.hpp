#ifndef OMDLAB_TYPES_HPP
#define OMDLAB_TYPES_HPP

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace omdlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Compensated (Kahan) accumulator; objective values feed certificates whose
// slack must be trusted down to 1e-12 against O(1) terms.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double kahan_dot(const Vec& a, const Vec& b) {
  KahanSum s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

// Iterate over a domain. log_coords carries natural-log weights for entropy
// trajectories whose coordinates reach e^(-eta*T); kept in sync with coords
// when present.
struct Point {
  Vec coords;
  std::optional<Vec> log_coords;

  static Point from_coords(Vec x) { return Point{std::move(x), std::nullopt}; }

  static Point from_logs(const Vec& lx) {
    Point p;
    p.coords = lx.array().exp().matrix();
    p.log_coords = lx;
    return p;
  }

  Eigen::Index dim() const { return coords.size(); }

  // Log of coordinate i, from the log representation when available.
  double log_coord(Eigen::Index i) const {
    if (log_coords) return (*log_coords)[i];
    return std::log(coords[i]);
  }
};

inline Point uniform_point(Eigen::Index d) {
  Point p;
  p.coords = Vec::Constant(d, 1.0 / static_cast<double>(d));
  p.log_coords = Vec::Constant(d, -std::log(static_cast<double>(d)));
  return p;
}

}  // namespace omdlab

#endif  // OMDLAB_TYPES_HPP
