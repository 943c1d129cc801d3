#include "omdlab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "omdlab/balance.hpp"
#include "omdlab/simplex_lp.hpp"

namespace omdlab {
namespace {

void check_start(const Domain& dom, const Regularizer& reg, const Point& w1) {
  if (!dom.feasible(w1.coords))
    throw std::invalid_argument("trajectory: w1 infeasible");
  if (reg.is_barrier() && dom.kind() != DomainKind::interval &&
      w1.coords.minCoeff() <= 0.0)
    throw std::invalid_argument("trajectory: w1 must be interior");
}

std::pair<Point, StepCertificate> solve_round(const StepObjective& obj,
                                              const PolytopeSolveOptions* popt) {
  if (obj.dom.kind() == DomainKind::polytope)
    return exact_step_polytope(obj, popt ? *popt : PolytopeSolveOptions{});
  return exact_step(obj);
}

// Random direction in the feasible kernel at w: sum-zero for simplex rows,
// a random basis combination for polytopes, +/-1 on an interval.
Vec random_kernel_direction(const Domain& dom, const std::vector<Vec>* basis,
                            const CounterRng& rng, std::uint64_t ctr) {
  const Eigen::Index d = dom.dim();
  if (dom.kind() == DomainKind::interval) {
    return Vec::Constant(1, rng.bits(ctr) & 1 ? 1.0 : -1.0);
  }
  Vec u(d);
  if (dom.kind() == DomainKind::simplex) {
    for (Eigen::Index i = 0; i < d; ++i) u[i] = rng.normal(ctr + i);
    u.array() -= u.mean();
  } else {
    u.setZero();
    for (size_t k = 0; k < basis->size(); ++k)
      u += rng.normal(ctr + k) * (*basis)[k];
  }
  const double n = u.norm();
  if (n < 1e-12) return Vec::Zero(d);
  return u / n;
}

// Saturating noise: scale the direction until the certified slack lands in
// [eps/2, eps]. slack(s) is nondecreasing in s, so a bisection works off a
// bracket; returns nullopt when the band is unreachable along +/-u.
std::optional<Point> saturate_along(const StepObjective& obj, const Point& wstar,
                                    double lower_bound, const Vec& u, double eps,
                                    const Domain& dom) {
  const auto slack_at = [&](double s) {
    Vec w = wstar.coords + s * u;
    return objective_eval(obj, Point::from_coords(w)) - lower_bound;
  };
  for (const double sign : {1.0, -1.0}) {
    const Vec dir = sign * u;
    double smax;
    if (dom.kind() == DomainKind::interval) {
      const double x = wstar.coords[0];
      smax = dir[0] > 0 ? (dom.hi() - x) : (x - dom.lo());
      if (obj.reg.is_barrier() && dir[0] < 0) smax = 0.9 * x;
      smax = std::max(0.0, smax);
    } else {
      smax = 0.9 * max_positive_step(wstar.coords, dir);
    }
    if (!(smax > 0) || !std::isfinite(smax)) continue;
    if (slack_at(sign > 0 ? smax : -smax) < eps / 2) continue;
    double lo = 0.0, hi = smax;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double sl = slack_at(sign > 0 ? mid : -mid);
      if (sl > eps)
        hi = mid;
      else if (sl < eps / 2)
        lo = mid;
      else {
        Vec w = wstar.coords + (sign > 0 ? mid : -mid) * u;
        return Point::from_coords(w);
      }
    }
    break;
  }
  return std::nullopt;
}

}  // namespace

double Trajectory::max_slack() const {
  double s = 0.0;
  for (const auto& c : certificates) s = std::max(s, c.slack);
  return s;
}

Trajectory run_exact(const Domain& dom, const Regularizer& reg,
                     const std::vector<Vec>& losses, double eta,
                     const Point& w1) {
  check_start(dom, reg, w1);
  Trajectory traj;
  traj.kind = TrajKind::exact;
  traj.eta = eta;
  traj.eps = 0.0;
  traj.losses = losses;
  traj.iterates.push_back(w1);

  std::vector<Vec> basis;
  PolytopeSolveOptions popt;
  if (dom.kind() == DomainKind::polytope) {
    basis = kernel_basis(dom);
    popt.basis = &basis;
    popt.gap_target = 1e-12;
  }

  for (size_t t = 0; t < losses.size(); ++t) {
    StepObjective obj{eta, losses[t], traj.iterates.back(), reg, dom};
    try {
      auto [w, cert] = solve_round(obj, &popt);
      traj.certificates.push_back(cert);
      traj.iterates.push_back(std::move(w));
    } catch (const std::exception& e) {
      throw std::runtime_error("run_exact: round " + std::to_string(t + 1) +
                               ": " + e.what());
    }
  }
  return traj;
}

Trajectory run_honest_inexact(const Domain& dom, const Regularizer& reg,
                              const std::vector<Vec>& losses, double eta,
                              double eps, const Point& w1, NoisePolicy policy,
                              std::uint64_t seed) {
  if (eps < kCertFloor)
    throw std::invalid_argument(
        "run_honest_inexact: eps below numeric resolution (1e-12)");
  check_start(dom, reg, w1);

  Trajectory traj;
  traj.kind = TrajKind::honest;
  traj.eta = eta;
  traj.eps = eps;
  traj.losses = losses;
  traj.iterates.push_back(w1);

  std::vector<Vec> basis;
  PolytopeSolveOptions popt;
  if (dom.kind() == DomainKind::polytope) {
    basis = kernel_basis(dom);
    popt.basis = &basis;
    popt.gap_target = eps / 10.0;
  }
  const CounterRng rng(seed, 0x6f6d646c);

  for (size_t t = 0; t < losses.size(); ++t) {
    StepObjective obj{eta, losses[t], traj.iterates.back(), reg, dom};
    auto [wstar, cert] = solve_round(obj, &popt);
    if (cert.slack > eps)
      throw std::runtime_error("run_honest_inexact: solver slack " +
                               std::to_string(cert.slack) + " above eps");

    if (policy == NoisePolicy::saturating && cert.slack < eps / 2) {
      bool placed = false;
      for (int attempt = 0; attempt < 16 && !placed; ++attempt) {
        const Vec u = random_kernel_direction(
            dom, basis.empty() ? nullptr : &basis, rng,
            (static_cast<std::uint64_t>(t) << 16) + 97ULL * attempt);
        if (u.size() == 0 || u.lpNorm<Eigen::Infinity>() == 0.0) continue;
        if (auto wp = saturate_along(obj, wstar, cert.min_lower_bound, u, eps, dom)) {
          const double value = objective_eval(obj, *wp);
          StepCertificate c;
          c.value_at_candidate = value;
          c.min_lower_bound = cert.min_lower_bound;
          c.slack = std::max(0.0, value - cert.min_lower_bound);
          c.method = cert.method;
          if (c.slack <= eps) {
            traj.certificates.push_back(c);
            traj.iterates.push_back(std::move(*wp));
            placed = true;
          }
        }
      }
      if (placed) continue;
      traj.fallback_warning = true;  // tight fallback below
    }

    traj.certificates.push_back(cert);
    traj.iterates.push_back(std::move(wstar));
  }
  return traj;
}

Trajectory build_smooth_stuck(double D, double beta, double eps, double eta,
                              long T) {
  if (!(D > 0) || !(beta > 0) || !(eps > 0) || !(eta > 0) || T < 1)
    throw std::invalid_argument("build_smooth_stuck: bad parameters");
  const double ell = std::min(std::sqrt(2.0 * beta * eps) / eta, 1.0);
  if (eta / beta * ell > D / 2)
    throw std::runtime_error(
        "build_smooth_stuck: exact step leaves the interval; construction invalid");

  const Domain dom = Domain::interval(0.0, D);
  const Regularizer reg = Regularizer::euclidean(beta);
  const Point anchor = Point::from_coords(Vec::Constant(1, D / 2));
  const Vec loss = Vec::Constant(1, ell);

  Trajectory traj;
  traj.kind = TrajKind::adversarial;
  traj.eta = eta;
  traj.eps = eps;
  traj.iterates.assign(T + 1, anchor);
  traj.losses.assign(T, loss);

  StepObjective obj{eta, loss, anchor, reg, dom};
  const auto [ok, cert] = certify(obj, anchor, eps);
  if (!ok)
    throw std::runtime_error("build_smooth_stuck: frozen step fails certification");
  traj.certificates.assign(T, cert);
  return traj;
}

Trajectory build_entropy_stuck(double alpha, double eps, double eta, long T) {
  if (!(eta > 0) || T < 2)
    throw std::invalid_argument("build_entropy_stuck: bad parameters");
  if (!(alpha <= T / 2.0))
    throw std::invalid_argument("build_entropy_stuck: requires alpha <= T/2");
  if (eps < 4.0 * eta * std::exp(-eta * alpha) * (1.0 - 1e-12))
    throw std::invalid_argument(
        "build_entropy_stuck: requires eps >= 4*eta*exp(-eta*alpha)");

  const long tau = static_cast<long>(std::ceil(std::log(4.0 * eta / eps) / eta));
  if (tau < 0 || tau > T)
    throw std::invalid_argument("build_entropy_stuck: tau out of range");

  const Domain dom = Domain::simplex(2);
  const Regularizer reg = Regularizer::neg_entropy();
  Vec hit(2), rest(2);
  hit << 1.0, 0.0;
  rest << 0.0, 1.0;

  Trajectory traj;
  traj.kind = TrajKind::adversarial;
  traj.eta = eta;
  traj.eps = eps;
  traj.iterates.push_back(uniform_point(2));

  for (long t = 0; t < tau; ++t) {
    traj.losses.push_back(hit);
    StepObjective obj{eta, hit, traj.iterates.back(), reg, dom};
    auto [w, cert] = exact_step(obj);
    traj.certificates.push_back(cert);
    traj.iterates.push_back(std::move(w));
  }

  const Point frozen = traj.iterates.back();
  if (!stuck_criterion(reg, frozen.coords[0], eta, eps))
    throw std::runtime_error(
        "build_entropy_stuck: stuck criterion fails at the frozen coordinate");

  for (long t = tau; t < T; ++t) {
    traj.losses.push_back(rest);
    StepObjective obj{eta, rest, frozen, reg, dom};
    StepCertificate cert;
    if (eps >= kCertFloor) {
      auto [ok, c] = certify(obj, frozen, eps);
      if (!ok)
        throw std::runtime_error("build_entropy_stuck: frozen round " +
                                 std::to_string(t + 1) + " fails certification");
      cert = c;
    } else {
      auto [ok, c] = certify(obj, frozen, kCertFloor);
      cert = c;
      cert.relaxed_tolerance = true;
    }
    traj.certificates.push_back(cert);
    traj.iterates.push_back(frozen);
  }
  return traj;
}

Trajectory build_dimension_stuck(const Regularizer& reg, Eigen::Index d,
                                 double eps, double eta, long T) {
  if (!reg.is_barrier())
    throw std::invalid_argument("build_dimension_stuck: barrier regularizer required");
  const double threshold =
      4.0 * eta * eta / (reg.c1() * std::pow(static_cast<double>(d), reg.nu()));
  if (eps < threshold * (1.0 - 1e-12))
    throw std::invalid_argument(
        "build_dimension_stuck: requires eps >= 4*eta^2/(c1*d^nu) = " +
        std::to_string(threshold));

  const Domain dom = Domain::simplex(d);
  const Point u = uniform_point(d);
  Vec loss = Vec::Ones(d);
  loss[d - 1] = 0.0;

  Trajectory traj;
  traj.kind = TrajKind::adversarial;
  traj.eta = eta;
  traj.eps = eps;
  traj.iterates.assign(T + 1, u);
  traj.losses.assign(T, loss);

  StepObjective obj{eta, loss, u, reg, dom};
  const auto [ok, cert] = certify(obj, u, eps);
  if (!ok)
    throw std::runtime_error(
        "build_dimension_stuck: frozen-uniform step fails certification");
  traj.certificates.assign(T, cert);
  return traj;
}

Trajectory build_polytope_stuck(const HardPolytope& hard,
                                const LossStream& losses, double eta,
                                double eps) {
  if (!(eps < 4 * eta))
    throw std::invalid_argument("build_polytope_stuck: requires eps < 4 eta");
  if (losses.spec.kind != LossKind::gaussian_polytope)
    throw std::invalid_argument("build_polytope_stuck: gaussian_polytope stream required");
  const long tau = static_cast<long>(std::ceil(hard.tau));
  if (!hardness_event(losses, hard.m, tau, hard.event_round_bound))
    throw std::invalid_argument(
        "build_polytope_stuck: losses do not satisfy the hardness event");
  if (losses.T <= tau)
    throw std::invalid_argument("build_polytope_stuck: T must exceed tau");

  const Domain dom = hard.domain();
  const Regularizer reg = Regularizer::neg_entropy();
  const double inv_d = 1.0 / static_cast<double>(hard.d);

  PolytopeSolveOptions popt;
  popt.basis = &hard.basis;
  popt.gap_target = 1e-12;
  popt.lmo = [&hard](const Vec& c) { return hard.lmo(c); };

  Trajectory traj;
  traj.kind = TrajKind::adversarial;
  traj.eta = eta;
  traj.eps = eps;
  traj.iterates.push_back(hard.w1);

  for (long t = 0; t < tau; ++t) {
    traj.losses.push_back(losses.rows[t]);
    StepObjective obj{eta, losses.rows[t], traj.iterates.back(), reg, dom};
    auto [w, cert] = exact_step_polytope(obj, popt);
    traj.certificates.push_back(cert);
    traj.iterates.push_back(std::move(w));
  }

  // pinned coefficient from the end of the exact phase
  double pinned = hard.alpha_of(traj.iterates.back().coords)[hard.m];
  const double pin_bound = -inv_d + std::exp(-hard.m / 8.0);
  if (pinned > pin_bound)
    throw std::runtime_error("build_polytope_stuck: pinned coefficient " +
                             std::to_string(pinned) + " above -1/d + e^{-m/8}");

  PolytopeSolveOptions popt2 = popt;
  popt2.gap_target = std::min(1e-10, eps / 100.0);
  for (long t = tau; t < losses.T; ++t) {
    traj.losses.push_back(losses.rows[t]);
    StepObjective obj{eta, losses.rows[t], traj.iterates.back(), reg, dom};
    auto [wstar, cert] = exact_step_polytope(obj, popt2);

    Vec alpha = hard.alpha_of(wstar.coords);
    alpha[hard.m] = pinned;
    Vec w = hard.point_of(alpha);
    if (w.minCoeff() <= 0.0)
      throw std::runtime_error("build_polytope_stuck: modified step left the interior");
    const Point wp = Point::from_coords(w);

    const double value = objective_eval(obj, wp);
    StepCertificate mc;
    mc.value_at_candidate = value;
    mc.min_lower_bound = cert.min_lower_bound;
    mc.slack = std::max(0.0, value - cert.min_lower_bound);
    mc.method = CertMethod::fw_gap;
    if (mc.slack > eps)
      throw std::runtime_error("build_polytope_stuck: round " +
                               std::to_string(t + 1) + " slack " +
                               std::to_string(mc.slack) + " above eps");
    if (w[5 * hard.m] < inv_d * (1.0 - 1e-10))
      throw std::runtime_error(
          "build_polytope_stuck: coordinate 5m+1 dropped below 1/d");

    traj.certificates.push_back(mc);
    traj.iterates.push_back(wp);
  }
  return traj;
}

Trajectory run_ftrl_approx(const Domain& dom, const Regularizer& reg,
                           const std::vector<Vec>& losses, double eta,
                           double eps, NoisePolicy policy, std::uint64_t seed) {
  if (dom.kind() != DomainKind::simplex)
    throw std::invalid_argument("run_ftrl_approx: simplex domain required");
  if (eps < kCertFloor)
    throw std::invalid_argument(
        "run_ftrl_approx: eps below numeric resolution (1e-12)");

  // On the simplex, grad R at uniform is constant across coordinates, so
  // minimizing eta <l_{1:t}, w> + R(w) coincides with an OMD step anchored
  // at uniform; certificates shift by the constant R(uniform).
  const Point u = uniform_point(dom.dim());
  const CounterRng rng(seed, 0x6674726c);

  Trajectory traj;
  traj.kind = TrajKind::ftrl;
  traj.eta = eta;
  traj.eps = eps;
  traj.losses = losses;
  traj.iterates.push_back(u);  // w_1 = argmin R

  Vec cum = Vec::Zero(dom.dim());
  for (size_t t = 0; t < losses.size(); ++t) {
    cum += losses[t];
    StepObjective obj{eta, cum, u, reg, dom};
    auto [wstar, cert] = exact_step(obj);
    if (policy == NoisePolicy::saturating && cert.slack < eps / 2) {
      bool placed = false;
      for (int attempt = 0; attempt < 16 && !placed; ++attempt) {
        const Vec dir = random_kernel_direction(
            dom, nullptr, rng, (static_cast<std::uint64_t>(t) << 16) + 97ULL * attempt);
        if (dir.lpNorm<Eigen::Infinity>() == 0.0) continue;
        if (auto wp = saturate_along(obj, wstar, cert.min_lower_bound, dir, eps, dom)) {
          const double value = objective_eval(obj, *wp);
          StepCertificate c;
          c.value_at_candidate = value;
          c.min_lower_bound = cert.min_lower_bound;
          c.slack = std::max(0.0, value - cert.min_lower_bound);
          c.method = cert.method;
          if (c.slack <= eps) {
            traj.certificates.push_back(c);
            traj.iterates.push_back(std::move(*wp));
            placed = true;
          }
        }
      }
      if (placed) continue;
      traj.fallback_warning = true;
    }
    traj.certificates.push_back(cert);
    traj.iterates.push_back(std::move(wstar));
  }
  return traj;
}

RegretReport regret(const Trajectory& traj, const Domain& dom,
                    const std::optional<Point>& comparator) {
  const long T = traj.rounds();
  Vec cum = Vec::Zero(dom.dim());
  for (const auto& l : traj.losses) cum += l;

  Point comp;
  if (comparator) {
    comp = *comparator;
  } else {
    switch (dom.kind()) {
      case DomainKind::simplex: {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < cum.size(); ++i)
          if (cum[i] < cum[best]) best = i;  // ties: lowest index
        Vec v = Vec::Zero(dom.dim());
        v[best] = 1.0;
        comp = Point::from_coords(v);
        break;
      }
      case DomainKind::interval: {
        const double at_lo = cum[0] * dom.lo(), at_hi = cum[0] * dom.hi();
        comp = Point::from_coords(Vec::Constant(1, at_lo <= at_hi ? dom.lo() : dom.hi()));
        break;
      }
      case DomainKind::polytope: {
        // the LP vertex minimizer is the best fixed point in hindsight
        comp = Point::from_coords(solve_standard_lp(dom.A(), dom.b(), cum).x);
        break;
      }
    }
  }

  RegretReport rep;
  rep.comparator = comp;
  rep.per_round_regret.resize(T);
  KahanSum alg, cmp;
  for (long t = 0; t < T; ++t) {
    const double lw = kahan_dot(traj.losses[t], traj.iterates[t].coords);
    const double lc = kahan_dot(traj.losses[t], comp.coords);
    alg.add(lw);
    cmp.add(lc);
    rep.per_round_regret[t] = lw - lc;
  }
  rep.cumulative_loss = alg.value();
  rep.comparator_loss = cmp.value();
  rep.regret = rep.cumulative_loss - rep.comparator_loss;
  return rep;
}

}  // namespace omdlab
