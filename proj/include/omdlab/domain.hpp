#ifndef OMDLAB_DOMAIN_HPP
#define OMDLAB_DOMAIN_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omdlab/types.hpp"

namespace omdlab {

enum class DomainKind { simplex, polytope, interval };

// Decision set: probability simplex, standard-form polytope {Aw=b, w>=0},
// or a closed interval [lo, hi].
class Domain {
 public:
  static Domain simplex(Eigen::Index d) {
    if (d < 2) throw std::invalid_argument("simplex: need d >= 2");
    Domain dom;
    dom.kind_ = DomainKind::simplex;
    dom.d_ = d;
    return dom;
  }

  static Domain polytope(Mat A, Vec b) {
    if (A.rows() == 0 || A.rows() >= A.cols())
      throw std::invalid_argument("polytope: need 0 < rows < cols");
    if (b.size() != A.rows())
      throw std::invalid_argument("polytope: b size mismatch");
    Domain dom;
    dom.kind_ = DomainKind::polytope;
    dom.d_ = A.cols();
    dom.A_ = std::move(A);
    dom.b_ = std::move(b);
    return dom;
  }

  static Domain interval(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("interval: need lo < hi");
    Domain dom;
    dom.kind_ = DomainKind::interval;
    dom.d_ = 1;
    dom.lo_ = lo;
    dom.hi_ = hi;
    return dom;
  }

  DomainKind kind() const { return kind_; }
  Eigen::Index dim() const { return d_; }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  // Index of the first violated constraint, or nullopt when feasible.
  // Equality rows come first, then nonnegativity (row m+i for coordinate i).
  std::optional<Eigen::Index> violated_constraint(const Vec& w,
                                                  double tol = 1e-9) const {
    if (w.size() != d_) return 0;
    switch (kind_) {
      case DomainKind::simplex: {
        if (std::abs(w.sum() - 1.0) > tol) return 0;
        for (Eigen::Index i = 0; i < d_; ++i)
          if (w[i] < -tol) return 1 + i;
        return std::nullopt;
      }
      case DomainKind::polytope: {
        const Vec res = A_ * w - b_;
        for (Eigen::Index r = 0; r < res.size(); ++r)
          if (std::abs(res[r]) > tol) return r;
        for (Eigen::Index i = 0; i < d_; ++i)
          if (w[i] < -tol) return A_.rows() + i;
        return std::nullopt;
      }
      case DomainKind::interval: {
        if (w[0] < lo_ - tol) return 0;
        if (w[0] > hi_ + tol) return 1;
        return std::nullopt;
      }
    }
    return 0;
  }

  bool feasible(const Vec& w, double tol = 1e-9) const {
    return !violated_constraint(w, tol).has_value();
  }

  // Strictly inside the nonnegativity (or interval) boundary.
  bool interior(const Vec& w, double margin = 0.0) const {
    if (!feasible(w)) return false;
    if (kind_ == DomainKind::interval)
      return w[0] > lo_ + margin && w[0] < hi_ - margin;
    return w.minCoeff() > margin;
  }

  Vec center() const {
    switch (kind_) {
      case DomainKind::simplex:
        return Vec::Constant(d_, 1.0 / static_cast<double>(d_));
      case DomainKind::interval:
        return Vec::Constant(1, 0.5 * (lo_ + hi_));
      case DomainKind::polytope: {
        const Vec u = Vec::Constant(d_, 1.0 / static_cast<double>(d_));
        if (feasible(u, 1e-9)) return u;
        throw std::runtime_error("polytope: no canonical center (uniform infeasible)");
      }
    }
    throw std::logic_error("unreachable");
  }

  std::string name() const {
    switch (kind_) {
      case DomainKind::simplex: return "simplex";
      case DomainKind::polytope: return "polytope";
      case DomainKind::interval: return "interval";
    }
    return "?";
  }

 private:
  DomainKind kind_ = DomainKind::simplex;
  Eigen::Index d_ = 2;
  Mat A_;
  Vec b_;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

}  // namespace omdlab

#endif  // OMDLAB_DOMAIN_HPP
