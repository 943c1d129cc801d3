#include "omdlab/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "omdlab/geometry.hpp"

namespace omdlab {
namespace {

void check_kernel_vector(const Domain& dom, const Vec& v) {
  if (v.size() != dom.dim())
    throw std::invalid_argument("balance: vector dimension mismatch");
  double resid;
  if (dom.kind() == DomainKind::simplex)
    resid = std::abs(v.sum());
  else if (dom.kind() == DomainKind::polytope)
    resid = (dom.A() * v).lpNorm<Eigen::Infinity>();
  else
    throw std::invalid_argument("balance: interval domain has no kernel");
  if (resid > 1e-10)
    throw std::invalid_argument("balance: v not in ker(A), residual " +
                                std::to_string(resid));
}

const Point& iterate_at(const Trajectory& traj, long t) {
  if (t < 1 || t > static_cast<long>(traj.iterates.size()))
    throw std::out_of_range("balance: time index " + std::to_string(t));
  return traj.iterates[t - 1];
}

}  // namespace

double trajectory_balance(const Trajectory& traj, const Regularizer& reg,
                          const Domain& dom, const Vec& v, long t1, long t2) {
  check_kernel_vector(dom, v);
  const Vec g1 = regularizer_gradient(reg, iterate_at(traj, t1));
  const Vec g2 = regularizer_gradient(reg, iterate_at(traj, t2));
  return kahan_dot(g1 - g2, v);
}

BalanceReport balance_report(const Trajectory& traj, const Regularizer& reg,
                             const Domain& dom, const std::vector<Vec>& basis,
                             const std::vector<long>& time_grid) {
  BalanceReport rep;
  double max_signed = -std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (size_t vi = 0; vi < basis.size(); ++vi) {
    Vec v = basis[vi] / basis[vi].lpNorm<1>();
    check_kernel_vector(dom, v);
    // gradients projected once per time, pairs read off the differences
    std::vector<double> gv(time_grid.size());
    for (size_t k = 0; k < time_grid.size(); ++k)
      gv[k] = kahan_dot(regularizer_gradient(reg, iterate_at(traj, time_grid[k])), v);
    for (size_t a = 0; a < time_grid.size(); ++a) {
      for (size_t b = a + 1; b < time_grid.size(); ++b) {
        const double val = gv[a] - gv[b];
        rep.per_pair.push_back({static_cast<int>(vi), time_grid[a], time_grid[b], val});
        max_signed = std::max(max_signed, val);
        max_abs = std::max(max_abs, std::abs(val));
      }
    }
  }
  rep.max_over_pairs = max_signed;
  rep.k_balanced_at = max_abs;
  return rep;
}

double loss_balance(const std::vector<Vec>& losses,
                    const std::vector<Vec>& basis) {
  if (basis.empty()) return 0.0;
  const long nv = static_cast<long>(basis.size());
  double alpha = 0.0;
#ifdef _OPENMP
#pragma omp parallel for reduction(max : alpha) schedule(static)
#endif
  for (long vi = 0; vi < nv; ++vi) {
    const Vec v = basis[vi] / basis[vi].lpNorm<1>();
    // max over intervals of <l_{t1:t2}, +/-v> = spread of the prefix sums
    double prefix = 0.0, lo = 0.0, hi = 0.0;
    KahanSum acc;
    for (const auto& l : losses) {
      acc.add(l.dot(v));
      prefix = acc.value();
      lo = std::min(lo, prefix);
      hi = std::max(hi, prefix);
    }
    alpha = std::max(alpha, hi - lo);
  }
  return alpha;
}

double loss_balance_reference(const std::vector<Vec>& losses,
                              const std::vector<Vec>& basis) {
  const long T = static_cast<long>(losses.size());
  double alpha = 0.0;
  for (const auto& raw : basis) {
    const Vec v = raw / raw.lpNorm<1>();
    for (long t1 = 0; t1 < T; ++t1) {
      KahanSum s;
      for (long t2 = t1; t2 < T; ++t2) {
        s.add(losses[t2].dot(v));
        alpha = std::max(alpha, std::abs(s.value()));
      }
    }
  }
  return alpha;
}

double psi_floor(double nu, double c1, double eta, long T, Eigen::Index d) {
  if (nu <= 1.0)
    throw std::invalid_argument(
        "psi_floor: nu must be > 1 (entropy has no polynomial floor)");
  const double den = 8.0 * eta * static_cast<double>(T) * static_cast<double>(d) +
                     c1 * std::pow(2.0 * static_cast<double>(d), nu - 1.0);
  return std::pow(c1 / den, 1.0 / (nu - 1.0));
}

double entropy_gradient_ceiling(const Trajectory& traj, const Regularizer& reg,
                                double k) {
  const Eigen::Index d = traj.iterates.front().dim();
  const double dd = static_cast<double>(d);
  const double bound =
      std::max(4.0 * k * dd - reg.r1(1.0 / dd), -reg.r1(1.0 / (2.0 * dd)));
  double margin = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < traj.iterates.size(); ++t) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double neg_r1 = -reg.r1_from_log(traj.iterates[t].log_coord(i));
      const double m = bound - neg_r1;
      if (m < -1e-9)
        throw std::runtime_error("entropy_gradient_ceiling: violated at (t=" +
                                 std::to_string(t + 1) + ", i=" +
                                 std::to_string(i + 1) + "), margin " +
                                 std::to_string(m));
      margin = std::min(margin, m);
    }
  }
  return margin;
}

bool simplex_coordinate_bounds_check(const Trajectory& traj,
                                     const Regularizer& reg, Eigen::Index i,
                                     Eigen::Index i_star, long t1, long t2,
                                     double k) {
  const double f = std::exp(k / reg.c1());
  const Point& a = iterate_at(traj, t1);
  const Point& b = iterate_at(traj, t2);
  const double rel = 1e-12;
  if (b.coords[i] >= a.coords[i] &&
      f * b.coords[i_star] < a.coords[i_star] * (1.0 - rel))
    return false;
  if (b.coords[i_star] <= a.coords[i_star] &&
      b.coords[i] > f * a.coords[i] * (1.0 + rel))
    return false;
  return true;
}

bool stuck_criterion(const Regularizer& reg, double w, double eta, double eps) {
  return 4.0 * eta / reg.c1() * std::pow(w, reg.nu()) <= eps;
}

double audit_max_step(const Trajectory& traj, const Regularizer& reg) {
  if (traj.eta > 0.25 + 1e-15)
    throw std::invalid_argument("audit_max_step: requires eta <= 1/4");
  double margin = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t + 1 < traj.iterates.size(); ++t) {
    const Vec& a = traj.iterates[t].coords;
    const Vec& b = traj.iterates[t + 1].coords;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double h = std::min(reg.r2(a[i]), reg.r2(b[i]));
      const double bound = 4.0 * traj.eta / h + std::sqrt(traj.eps / h);
      const double m = bound - std::abs(a[i] - b[i]);
      if (m < -1e-12)
        throw std::runtime_error("audit_max_step: violated at (t=" +
                                 std::to_string(t + 1) + ", i=" +
                                 std::to_string(i + 1) + ")");
      margin = std::min(margin, m);
    }
  }
  return margin;
}

double audit_not_too_far(const Trajectory& traj, const Regularizer& reg) {
  if (traj.eta > 1.0 / (16.0 * reg.c1()) + 1e-15)
    throw std::invalid_argument("audit_not_too_far: requires eta <= 1/(16 c1)");
  double margin = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < traj.iterates.size(); ++t) {
    const Vec& w = traj.iterates[t].coords;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (traj.eps > std::pow(w[i], reg.nu()) / (16.0 * reg.c1())) continue;
      for (const long nb : {static_cast<long>(t) - 1, static_cast<long>(t) + 1}) {
        if (nb < 0 || nb >= static_cast<long>(traj.iterates.size())) continue;
        const double ratio = traj.iterates[nb].coords[i] / w[i];
        if (ratio < 0.5 - 1e-12)
          throw std::runtime_error("audit_not_too_far: violated at (t=" +
                                   std::to_string(t + 1) + ", i=" +
                                   std::to_string(i + 1) + ")");
        margin = std::min(margin, ratio - 0.5);
      }
    }
  }
  return margin;
}

}  // namespace omdlab
