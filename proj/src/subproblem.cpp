#include "omdlab/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "omdlab/simplex_lp.hpp"

namespace omdlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double max_positive_step(const Vec& x, const Vec& dir) {
  double g = kInf;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dir[i] < 0.0) g = std::min(g, -x[i] / dir[i]);
  }
  return std::min(g, 1e300);
}

namespace {

double logsumexp(const Vec& z) {
  const double m = z.maxCoeff();
  KahanSum s;
  for (Eigen::Index i = 0; i < z.size(); ++i) s.add(std::exp(z[i] - m));
  return m + std::log(s.value());
}

StepCertificate make_cert(double value, double lb, CertMethod method) {
  StepCertificate c;
  c.value_at_candidate = value;
  c.min_lower_bound = lb;
  c.slack = std::max(0.0, value - lb);
  c.method = method;
  return c;
}

// --- negative entropy over the simplex: multiplicative weights ------------

// log w*_i = log a_i - eta l_i - logZ; min phi = -logZ.
std::pair<Point, double> entropy_simplex_argmin(const StepObjective& obj) {
  const Eigen::Index d = obj.anchor.dim();
  Vec z(d);
  for (Eigen::Index i = 0; i < d; ++i)
    z[i] = obj.anchor.log_coord(i) - obj.eta * obj.loss[i];
  const double logZ = logsumexp(z);
  Point w = Point::from_logs(z.array() - logZ);
  return {std::move(w), -logZ};
}

// --- separable barrier over the simplex: dual bisection -------------------

struct DualRootResult {
  Point w;
  double lambda;
  double lower_bound;
};

DualRootResult dual_root_simplex(const StepObjective& obj) {
  const Eigen::Index d = obj.anchor.dim();
  const Regularizer& reg = obj.reg;
  Vec base(d);  // r'(a_i) - eta l_i
  for (Eigen::Index i = 0; i < d; ++i)
    base[i] = reg.r1(obj.anchor.coords[i]) - obj.eta * obj.loss[i];

  // w_i(lambda) = (r')^{-1}(base_i + lambda) is increasing in lambda.
  // At lambda_i = r'(1/d) - base_i every coordinate passes 1/d, so
  // [min_i lambda_i, max_i lambda_i] brackets the root of sum w_i = 1.
  const double r1_unif = reg.r1(1.0 / static_cast<double>(d));
  double lo = kInf, hi = -kInf;
  for (Eigen::Index i = 0; i < d; ++i) {
    lo = std::min(lo, r1_unif - base[i]);
    hi = std::max(hi, r1_unif - base[i]);
  }

  const auto sum_at = [&](double lambda) {
    KahanSum s;
    for (Eigen::Index i = 0; i < d; ++i)
      s.add(reg.r1_inverse(base[i] + lambda, 2.0, true));
    return s.value() - 1.0;
  };

  if (sum_at(lo) > 1e-12 || sum_at(hi) < -1e-12)
    throw std::runtime_error("exact_step: dual bracket failure [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");

  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    lambda = 0.5 * (lo + hi);
    const double s = sum_at(lambda);
    if (std::abs(s) <= 1e-15) break;
    (s < 0 ? lo : hi) = lambda;
  }

  Vec w(d);
  for (Eigen::Index i = 0; i < d; ++i)
    w[i] = reg.r1_inverse(base[i] + lambda, 2.0, true);
  w /= w.sum();

  // Weak-duality bound: L(lambda) = lambda + sum_i min_{u>0} psi_i(u) with
  // psi_i(u) = eta l_i u + D_r(u, a_i) - lambda u; the minimizer solves
  // r'(u) = base_i + lambda, same inversion as above (unclamped).
  KahanSum lb;
  lb.add(lambda);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double ai = obj.anchor.coords[i];
    double u;
    try {
      u = reg.r1_inverse(base[i] + lambda, 1e12, false);
    } catch (const std::domain_error&) {
      return {Point::from_coords(w), lambda, -kInf};
    }
    lb.add(obj.eta * obj.loss[i] * u);
    lb.add(reg.r(u) - reg.r(ai) - reg.r1(ai) * (u - ai));
    lb.add(-lambda * u);
  }
  return {Point::from_coords(w), lambda, lb.value()};
}

// --- euclidean over the simplex: projection --------------------------------

// Projection of y onto the simplex: w_i = max(y_i - theta, 0).
double simplex_projection_threshold(const Vec& y) {
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssv = 0.0, theta = 0.0;
  int rho = 0;
  for (size_t j = 0; j < u.size(); ++j) {
    cssv += u[j];
    const double t = (cssv - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) {
      rho = static_cast<int>(j + 1);
      theta = t;
    }
  }
  (void)rho;
  return theta;
}

std::pair<Point, StepCertificate> euclidean_simplex_step(const StepObjective& obj) {
  const double beta = obj.reg.beta();
  const Vec y = obj.anchor.coords - (obj.eta / beta) * obj.loss;
  const double theta = simplex_projection_threshold(y);
  Vec w = (y.array() - theta).cwiseMax(0.0).matrix();
  w /= w.sum();

  // phi(w) = (beta/2)|w - y|^2 + c0; dual in the equality multiplier
  // mu = -beta*theta with per-coordinate minimizers max(0, y_i + mu/beta).
  KahanSum c0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    c0.add(obj.eta * obj.loss[i] * obj.anchor.coords[i]);
    c0.add(-obj.eta * obj.eta * obj.loss[i] * obj.loss[i] / (2.0 * beta));
  }
  const double mu = -beta * theta;
  KahanSum lb;
  lb.add(mu);
  lb.add(c0.value());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double wi = std::max(0.0, y[i] - theta);
    lb.add(0.5 * beta * (wi - y[i]) * (wi - y[i]) - mu * wi);
  }

  Point p = Point::from_coords(std::move(w));
  const double value = objective_eval(obj, p);
  return {std::move(p), make_cert(value, lb.value(), CertMethod::closed_form)};
}

// --- interval ---------------------------------------------------------------

std::pair<Point, StepCertificate> interval_step(const StepObjective& obj) {
  const double lo = obj.dom.lo(), hi = obj.dom.hi();
  const double a = obj.anchor.coords[0];
  const double el = obj.loss[0];
  double w, minval;
  if (obj.reg.kind() == RegKind::euclidean) {
    const double beta = obj.reg.beta();
    const double y = a - (obj.eta / beta) * el;
    w = std::clamp(y, lo, hi);
    minval = obj.eta * el * w + 0.5 * beta * (w - a) * (w - a);
  } else {
    // stationary point of eta*l*w + D_r(w, a): r'(w) = r'(a) - eta*l
    const double g = obj.reg.r1(a) - obj.eta * el;
    double w0;
    try {
      w0 = obj.reg.r1_inverse(g, hi, true);
    } catch (const std::domain_error&) {
      w0 = std::max(lo, 1e-300);  // below range: pole side
    }
    w = std::clamp(w0, std::max(lo, 1e-300), hi);
    const double ra = obj.reg.r(a);
    minval = obj.eta * el * w + obj.reg.r(w) - ra - obj.reg.r1(a) * (w - a);
  }
  Point p = Point::from_coords(Vec::Constant(1, w));
  const double value = objective_eval(obj, p);
  return {std::move(p), make_cert(value, minval, CertMethod::closed_form)};
}

// --- polytope: Frank-Wolfe with interior Newton polish ----------------------

double max_interior_step(const Vec& x, const Vec& dir, double cap) {
  // largest gamma <= cap with x + gamma*dir >= 1e-3 * x componentwise
  double g = cap;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dir[i] < 0.0) g = std::min(g, -(1.0 - 1e-3) * x[i] / dir[i]);
  }
  return g;
}

// Exact line search on [0, gmax] for convex phi along x + g*d: bisection on
// the directional derivative.
double fw_line_search(const StepObjective& obj, const Point& x, const Vec& d,
                      double gmax) {
  const auto deriv = [&](double g) {
    Point p = Point::from_coords(x.coords + g * d);
    return objective_gradient(obj, p).dot(d);
  };
  if (deriv(gmax) <= 0.0) return gmax;
  double lo = 0.0, hi = gmax;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (deriv(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Damped Newton in the kernel coordinates; leaves x at (near) the interior
// optimum. Returns false if no progress was possible.
bool newton_polish(const StepObjective& obj, const std::vector<Vec>& basis,
                   Vec& x) {
  const Eigen::Index d = x.size();
  const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
  Mat V(d, k);
  for (Eigen::Index c = 0; c < k; ++c) V.col(c) = basis[c];

  bool moved = false;
  for (int it = 0; it < 60; ++it) {
    Point px = Point::from_coords(x);
    const Vec g = objective_gradient(obj, px);
    const Vec gk = V.transpose() * g;
    Vec h(d);
    for (Eigen::Index i = 0; i < d; ++i) h[i] = obj.reg.r2(x[i]);
    const Mat H = V.transpose() * h.asDiagonal() * V;
    Eigen::LDLT<Mat> ldlt(H);
    if (ldlt.info() != Eigen::Success) return moved;
    const Vec p = ldlt.solve(-gk);
    const double decrement = -gk.dot(p);  // = p'Hp >= 0
    if (!(decrement > 1e-17)) return moved;
    const Vec dir = V * p;
    double gamma = std::min(1.0, 0.99 * max_positive_step(x, dir));
    const double f0 = objective_eval(obj, px);
    int bt = 0;
    for (; bt < 60; ++bt) {
      Vec xn = x + gamma * dir;
      if (xn.minCoeff() > 0.0) {
        const double fn = objective_eval(obj, Point::from_coords(xn));
        if (fn <= f0 - 0.25 * gamma * decrement) {
          x = std::move(xn);
          moved = true;
          break;
        }
      }
      gamma *= 0.5;
    }
    if (bt == 60) return moved;
  }
  return moved;
}

}  // namespace

double objective_eval(const StepObjective& obj, const Point& w) {
  if (auto viol = obj.dom.violated_constraint(w.coords))
    throw std::runtime_error("objective_eval: infeasible point, constraint " +
                             std::to_string(*viol));
  if (obj.reg.is_barrier() && obj.dom.kind() != DomainKind::interval &&
      w.coords.minCoeff() <= 0.0)
    throw std::domain_error("objective_eval: boundary point under barrier");
  KahanSum s;
  for (Eigen::Index i = 0; i < w.dim(); ++i)
    s.add(obj.eta * obj.loss[i] * w.coords[i]);
  s.add(bregman(obj.reg, w, obj.anchor));
  return s.value();
}

Vec objective_gradient(const StepObjective& obj, const Point& w) {
  return obj.eta * obj.loss + regularizer_gradient(obj.reg, w) -
         regularizer_gradient(obj.reg, obj.anchor);
}

std::pair<Point, StepCertificate> exact_step(const StepObjective& obj) {
  switch (obj.dom.kind()) {
    case DomainKind::interval:
      return interval_step(obj);
    case DomainKind::simplex: {
      if (obj.reg.kind() == RegKind::neg_entropy) {
        auto [w, minval] = entropy_simplex_argmin(obj);
        const double value = objective_eval(obj, w);
        return {std::move(w), make_cert(value, minval, CertMethod::closed_form)};
      }
      if (obj.reg.kind() == RegKind::euclidean) return euclidean_simplex_step(obj);
      DualRootResult res = dual_root_simplex(obj);
      const double value = objective_eval(obj, res.w);
      return {std::move(res.w),
              make_cert(value, res.lower_bound, CertMethod::dual_root)};
    }
    case DomainKind::polytope:
      throw std::invalid_argument("exact_step: use exact_step_polytope");
  }
  throw std::logic_error("unreachable");
}

std::pair<Point, StepCertificate> exact_step_polytope(const StepObjective& obj,
                                                      double gap_target) {
  PolytopeSolveOptions opt;
  opt.gap_target = gap_target;
  return exact_step_polytope(obj, opt);
}

std::pair<Point, StepCertificate> exact_step_polytope(
    const StepObjective& obj, const PolytopeSolveOptions& opt) {
  if (obj.dom.kind() != DomainKind::polytope)
    throw std::invalid_argument("exact_step_polytope: polytope domain required");
  if (!(opt.gap_target > 0))
    throw std::invalid_argument("exact_step_polytope: gap_target must be > 0");

  const auto lmo = [&](const Vec& c) -> Vec {
    if (opt.lmo) return opt.lmo(c);
    return solve_standard_lp(obj.dom.A(), obj.dom.b(), c).x;
  };

  std::vector<Vec> local_basis;
  const std::vector<Vec>* basis = opt.basis;
  if (!opt.pure_frank_wolfe && basis == nullptr) {
    local_basis = kernel_basis(obj.dom);
    basis = &local_basis;
  }

  Vec x = obj.anchor.coords;
  long iters = 0;
  double gap = kInf;
  if (!opt.pure_frank_wolfe) newton_polish(obj, *basis, x);

  while (true) {
    Point px = Point::from_coords(x);
    const Vec g = objective_gradient(obj, px);
    const Vec s = lmo(g);
    gap = g.dot(x - s);
    if (gap <= opt.gap_target) break;
    if (iters >= opt.max_iterations)
      throw std::runtime_error(
          "exact_step_polytope: iteration cap exceeded, best gap " +
          std::to_string(gap));
    const Vec dir = s - x;
    const double gmax = max_interior_step(x, dir, 1.0);
    const double gamma = fw_line_search(obj, px, dir, gmax);
    x += gamma * dir;
    ++iters;
    if (!opt.pure_frank_wolfe && iters % 64 == 0) newton_polish(obj, *basis, x);
  }

  Point p = Point::from_coords(x);
  const double value = objective_eval(obj, p);
  return {std::move(p), make_cert(value, value - gap, CertMethod::fw_gap)};
}

std::pair<bool, StepCertificate> certify(const StepObjective& obj,
                                         const Point& candidate, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("certify: eps must be > 0");
  const double eps_eff = std::max(eps, kCertFloor);

  double lb;
  CertMethod method;
  switch (obj.dom.kind()) {
    case DomainKind::interval: {
      lb = exact_step(obj).second.min_lower_bound;
      method = CertMethod::closed_form;
      break;
    }
    case DomainKind::simplex: {
      if (obj.reg.kind() == RegKind::neg_entropy) {
        lb = entropy_simplex_argmin(obj).second;
        method = CertMethod::closed_form;
      } else if (obj.reg.kind() == RegKind::euclidean) {
        lb = euclidean_simplex_step(obj).second.min_lower_bound;
        method = CertMethod::closed_form;
      } else {
        lb = dual_root_simplex(obj).lower_bound;
        method = CertMethod::dual_root;
      }
      break;
    }
    case DomainKind::polytope: {
      PolytopeSolveOptions opt;
      opt.gap_target = std::max(eps_eff / 100.0, 1e-13);
      lb = exact_step_polytope(obj, opt).second.min_lower_bound;
      method = CertMethod::fw_gap;
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }

  StepCertificate cert = make_cert(objective_eval(obj, candidate), lb, method);
  cert.relaxed_tolerance = eps < kCertFloor;
  return {cert.slack <= eps_eff, cert};
}

double approx_optimality_gap(const StepObjective& obj, const Point& candidate,
                             const Point& target, double eps, double beta) {
  const Vec g = objective_gradient(obj, candidate);
  const double ip = g.dot(target.coords - candidate.coords);
  const double l1 = (target.coords - candidate.coords).lpNorm<1>();
  const double bound = std::max(l1 * std::sqrt(2.0 * beta * eps), 2.0 * eps);
  if (ip < -bound - 1e-9)
    throw std::runtime_error(
        "approx_optimality_gap: first-order condition violated, inner product " +
        std::to_string(ip) + " < -" + std::to_string(bound));
  return ip;
}

}  // namespace omdlab
