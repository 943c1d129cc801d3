#include "omdlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace omdlab {
namespace {

// Limit of r at x -> 0+ for comparator evaluation.
double r_at_zero(const Regularizer& reg) {
  switch (reg.kind()) {
    case RegKind::euclidean:
    case RegKind::neg_entropy:
    case RegKind::tsallis:
      return 0.0;
    case RegKind::log_barrier:
      return std::numeric_limits<double>::infinity();
    case RegKind::custom_barrier:
      throw std::domain_error("bregman: custom barrier undefined at 0");
  }
  return 0.0;
}

}  // namespace

double bregman(const Regularizer& reg, const Point& w, const Point& w_prev) {
  if (w.dim() != w_prev.dim())
    throw std::invalid_argument("bregman: dimension mismatch");
  if (reg.is_barrier() && w_prev.coords.minCoeff() <= 0.0)
    throw std::domain_error("bregman: second argument on the barrier boundary");

  KahanSum s;
  for (Eigen::Index i = 0; i < w.dim(); ++i) {
    const double wi = w.coords[i];
    const double ai = w_prev.coords[i];
    if (reg.kind() == RegKind::neg_entropy) {
      // w log(w/a) - w + a with logs taken from the log representation
      if (wi == 0.0) {
        s.add(ai);
      } else if (wi < 0.0) {
        throw std::domain_error("bregman: negative coordinate");
      } else {
        s.add(wi * (w.log_coord(i) - w_prev.log_coord(i)));
        s.add(ai - wi);
      }
      continue;
    }
    const double rw = (wi == 0.0 && reg.is_barrier()) ? r_at_zero(reg) : reg.r(wi);
    const double ra = reg.r(ai);
    const double ga = reg.r1(ai);
    s.add(rw - ra - ga * (wi - ai));
    if (std::isinf(rw)) return std::numeric_limits<double>::infinity();
  }
  return s.value();
}

double effective_smoothness(const Regularizer& reg, const Point& w1,
                            const Point& w2) {
  if (reg.kind() == RegKind::euclidean) return reg.beta();
  if (w1.dim() != w2.dim())
    throw std::invalid_argument("effective_smoothness: dimension mismatch");

  double best = 0.0;
  bool any = false;
  for (Eigen::Index i = 0; i < w1.dim(); ++i) {
    if (w1.coords[i] == w2.coords[i]) continue;
    any = true;
    // r'' decreasing on (0,1] for barrier kinds: sup sits at the left end
    best = std::max(best, reg.r2(std::min(w1.coords[i], w2.coords[i])));
  }
  if (!any) {
    for (Eigen::Index i = 0; i < w1.dim(); ++i)
      best = std::max(best, reg.r2(w1.coords[i]));
  }
  return best;
}

std::vector<Vec> kernel_basis(const Domain& dom) {
  if (dom.kind() == DomainKind::interval)
    throw std::invalid_argument("kernel_basis: interval domain has no kernel");

  if (dom.kind() == DomainKind::simplex) {
    const Eigen::Index d = dom.dim();
    std::vector<Vec> basis;
    basis.reserve(d - 1);
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      Vec v = Vec::Zero(d);
      v[i] = 1.0;
      v[d - 1] = -1.0;
      basis.push_back(std::move(v));
    }
    return basis;
  }

  const Mat& A = dom.A();
  Eigen::FullPivLU<Mat> lu(A);
  lu.setThreshold(1e-10);
  if (lu.rank() < A.rows()) {
    // name the rows that do not increase the rank
    std::string rows;
    Eigen::Index rank_so_far = 0;
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      Eigen::FullPivLU<Mat> sub(A.topRows(r + 1));
      sub.setThreshold(1e-10);
      if (sub.rank() == rank_so_far) {
        if (!rows.empty()) rows += ", ";
        rows += std::to_string(r);
      } else {
        rank_so_far = sub.rank();
      }
    }
    throw std::runtime_error("kernel_basis: rank-deficient A, dependent rows {" +
                             rows + "}");
  }

  const Mat K = lu.kernel();
  std::vector<Vec> basis;
  basis.reserve(K.cols());
  for (Eigen::Index c = 0; c < K.cols(); ++c) basis.push_back(K.col(c));
  return basis;
}

Vec regularizer_gradient(const Regularizer& reg, const Point& w) {
  Vec g(w.dim());
  if (reg.kind() == RegKind::neg_entropy) {
    for (Eigen::Index i = 0; i < w.dim(); ++i) g[i] = w.log_coord(i) + 1.0;
    return g;
  }
  for (Eigen::Index i = 0; i < w.dim(); ++i) g[i] = reg.r1(w.coords[i]);
  return g;
}

}  // namespace omdlab
