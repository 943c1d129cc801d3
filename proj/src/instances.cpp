#include "omdlab/instances.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace omdlab {
namespace {

// Sub-stream layout: coordinate i of round t draws from stream i at
// counter t, so parallel and serial realizations coincide.
Vec iid_row(const LossSpec& spec, std::uint64_t seed, long t) {
  const Eigen::Index d = static_cast<Eigen::Index>(spec.coords.size());
  Vec row(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const auto& cd = spec.coords[i];
    row[i] = cd.type == CoordDist::Type::uniform
                 ? rng.uniform(static_cast<std::uint64_t>(t), cd.a, cd.b)
                 : cd.a + cd.b * rng.normal(static_cast<std::uint64_t>(t));
  }
  return row;
}

// gaussian_polytope coordinates (d = 5m+2): first m zero, [m+1,4m] constant
// one, [4m+1,5m] standard gaussians, 5m+1 gaussian with mean
// min(sqrt(eta d), 1), 5m+2 zero.
double gaussian_block_mean(int m, double eta) {
  const double d = 5.0 * m + 2.0;
  return std::min(std::sqrt(eta * d), 1.0);
}

Vec gaussian_polytope_row(const LossSpec& spec, std::uint64_t seed, long t) {
  const int m = spec.m;
  const Eigen::Index d = 5 * m + 2;
  Vec row = Vec::Zero(d);
  row.segment(m, 3 * m).setOnes();
  for (int j = 0; j < m; ++j) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(4 * m + j));
    row[4 * m + j] = rng.normal(static_cast<std::uint64_t>(t));
  }
  const CounterRng rng(seed, static_cast<std::uint64_t>(5 * m));
  row[5 * m] = gaussian_block_mean(m, spec.eta) +
               rng.normal(static_cast<std::uint64_t>(t));
  return row;
}

// Per-round sum over the (m+1)-coordinate gaussian block, without
// materializing full rows.
double block_sum(const LossSpec& spec, std::uint64_t seed, long t) {
  const int m = spec.m;
  KahanSum s;
  for (int j = 0; j < m; ++j) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(4 * m + j));
    s.add(rng.normal(static_cast<std::uint64_t>(t)));
  }
  const CounterRng rng(seed, static_cast<std::uint64_t>(5 * m));
  s.add(gaussian_block_mean(m, spec.eta) + rng.normal(static_cast<std::uint64_t>(t)));
  return s.value();
}

bool event_from_sums(const LossSpec& spec, std::uint64_t seed, long T, int m,
                     long tau, double round_bound) {
  (void)m;
  KahanSum head;
  for (long t = 0; t < std::min(tau, T); ++t) {
    const double s = block_sum(spec, seed, t);
    head.add(s);
    if (s > round_bound) return false;
  }
  if (head.value() > 0.0) return false;
  for (long t = std::min(tau, T); t < T; ++t) {
    if (block_sum(spec, seed, t) > round_bound) return false;
  }
  return true;
}

}  // namespace

LossStream make_loss_stream(const LossSpec& spec, long T, std::uint64_t seed) {
  if (T <= 0) throw std::invalid_argument("make_loss_stream: T must be > 0");
  LossStream out;
  out.spec = spec;
  out.T = T;
  out.seed = seed;
  out.rows.reserve(T);

  switch (spec.kind) {
    case LossKind::constant: {
      if (spec.constant.size() == 0)
        throw std::invalid_argument("constant stream: empty vector");
      for (long t = 0; t < T; ++t) out.rows.push_back(spec.constant);
      break;
    }
    case LossKind::switching: {
      long total = 0;
      for (const auto& [len, v] : spec.phases) total += len;
      if (total != T)
        throw std::invalid_argument("switching stream: phase lengths sum to " +
                                    std::to_string(total) + ", expected " +
                                    std::to_string(T));
      for (const auto& [len, v] : spec.phases)
        for (long k = 0; k < len; ++k) out.rows.push_back(v);
      break;
    }
    case LossKind::iid: {
      if (spec.coords.empty())
        throw std::invalid_argument("iid stream: no coordinate distributions");
      for (long t = 0; t < T; ++t) out.rows.push_back(iid_row(spec, seed, t));
      for (const auto& cd : spec.coords)
        if (cd.type == CoordDist::Type::gaussian) out.bounded = false;
      break;
    }
    case LossKind::gaussian_polytope: {
      if (spec.m < 1)
        throw std::invalid_argument("gaussian_polytope stream: m must be >= 1");
      for (long t = 0; t < T; ++t)
        out.rows.push_back(gaussian_polytope_row(spec, seed, t));
      out.bounded = false;
      break;
    }
  }

  if (out.bounded) {
    for (const auto& row : out.rows)
      if (row.lpNorm<Eigen::Infinity>() > 1.0 + 1e-12) out.bounded = false;
  }
  return out;
}

void write_loss_csv(const LossStream& stream, std::ostream& out) {
  out << "t";
  for (Eigen::Index i = 0; i < stream.dim(); ++i) out << ",l" << (i + 1);
  out << "\r\n";
  char buf[32];
  for (long t = 0; t < stream.T; ++t) {
    out << (t + 1);
    for (Eigen::Index i = 0; i < stream.dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", stream.rows[t][i]);
      out << ',' << buf;
    }
    out << "\r\n";
  }
}

Vec HardPolytope::lmo(const Vec& c) const {
  // reduce to kernel coordinates: minimize sum_i ct_i a_i + ct_{m+1} a_{m+1}
  // over a_i <= 1/d, 3 a_i + a_{m+1} >= -1/d, |a_{m+1}| <= 1/d
  const double inv_d = 1.0 / static_cast<double>(d);
  Vec ct(m + 1);
  for (int i = 0; i <= m; ++i) ct[i] = c.dot(basis[i]);

  Vec best_alpha;
  double best_val = std::numeric_limits<double>::infinity();
  for (const double am1 : {-inv_d, inv_d}) {
    Vec alpha(m + 1);
    alpha[m] = am1;
    double val = ct[m] * am1;
    const double lo = (-inv_d - am1) / 3.0;
    for (int i = 0; i < m; ++i) {
      alpha[i] = ct[i] >= 0.0 ? lo : inv_d;
      val += ct[i] * alpha[i];
    }
    if (val < best_val) {
      best_val = val;
      best_alpha = std::move(alpha);
    }
  }
  return point_of(best_alpha);
}

Vec HardPolytope::alpha_of(const Vec& w) const {
  Vec alpha(m + 1);
  const double inv_d = 1.0 / static_cast<double>(d);
  alpha[m] = w[5 * m + 1] - inv_d;           // coordinate 5m+2 (0-based 5m+1)
  for (int i = 0; i < m; ++i) alpha[i] = inv_d - w[m + i];
  return alpha;
}

Vec HardPolytope::point_of(const Vec& alpha) const {
  Vec w = w1.coords;
  for (int i = 0; i <= m; ++i) w += alpha[i] * basis[i];
  return w;
}

HardPolytope build_hard_polytope(double eps, double eta,
                                 bool enforce_asymptotic_m,
                                 long T_for_asymptotic) {
  if (!(eps > 0) || !(eta > 0))
    throw std::invalid_argument("build_hard_polytope: eps, eta must be > 0");
  if (!(eps < 4 * eta))
    throw std::invalid_argument(
        "build_hard_polytope: requires eps < 4 eta (standing assumption)");

  int m = static_cast<int>(std::ceil(16.0 * std::log(1.0 / eps)));
  m = std::max(m, 8);
  if (enforce_asymptotic_m) {
    if (T_for_asymptotic < 1)
      throw std::invalid_argument("build_hard_polytope: T needed for asymptotic m");
    m = std::max(m, static_cast<int>(std::ceil(
                        128.0 * std::log(2.0 * static_cast<double>(T_for_asymptotic)))));
  }

  HardPolytope hp;
  hp.m = m;
  hp.d = 5 * m + 2;
  hp.eta = eta;
  hp.eps = eps;
  hp.tau = 3.0 / eta;
  hp.event_round_bound = m / 16.0;
  hp.d_exceeds_inv_eta = static_cast<double>(hp.d) > 1.0 / eta;

  const Eigen::Index d = hp.d;
  hp.A = Mat::Zero(4 * m + 1, d);
  for (int i = 0; i < m; ++i) {
    hp.A(i, m + i) = 1;
    hp.A(i, 2 * m + i) = 1;
    hp.A(i, 3 * m + i) = -2;
    hp.A(m + i, m + i) = 1;
    hp.A(m + i, 2 * m + i) = -1;
    hp.A(2 * m + i, i) = 1;
    hp.A(2 * m + i, m + i) = 3;
    hp.A(2 * m + i, 4 * m + i) = 1;
    hp.A(3 * m + i, 4 * m + i) = 1;
    hp.A(3 * m + i, 5 * m) = -1;
  }
  hp.A(4 * m, 5 * m) = 1;
  hp.A(4 * m, 5 * m + 1) = 1;

  hp.w1 = uniform_point(d);
  hp.b = hp.A * hp.w1.coords;

  for (int i = 0; i < m; ++i) {
    Vec v = Vec::Zero(d);
    v[i] = 3;
    v[m + i] = -1;
    v[2 * m + i] = -1;
    v[3 * m + i] = -1;
    hp.basis.push_back(std::move(v));
  }
  Vec vm1 = Vec::Zero(d);
  for (int i = 0; i < m; ++i) vm1[i] = 1;
  vm1[5 * m + 1] = 1;
  for (int i = 4 * m; i <= 5 * m; ++i) vm1[i] = -1;
  hp.basis.push_back(std::move(vm1));

  for (const auto& v : hp.basis) {
    if ((hp.A * v).lpNorm<Eigen::Infinity>() > 1e-12)
      throw std::runtime_error("build_hard_polytope: basis vector fails A v = 0");
    if (std::abs(v.sum()) > 1e-12)
      throw std::runtime_error("build_hard_polytope: basis vector sum != 0");
  }
  if (!hp.domain().feasible(hp.w1.coords, 1e-12))
    throw std::runtime_error("build_hard_polytope: uniform point infeasible");
  return hp;
}

bool hardness_event(const LossStream& stream, int m, long tau) {
  return hardness_event(stream, m, tau, m / 16.0);
}

bool hardness_event(const LossStream& stream, int m, long tau,
                    double round_bound) {
  if (stream.spec.kind != LossKind::gaussian_polytope)
    throw std::invalid_argument("hardness_event: gaussian_polytope stream required");
  KahanSum head;
  for (long t = 0; t < stream.T; ++t) {
    KahanSum s;
    for (int i = 4 * m; i <= 5 * m; ++i) s.add(stream.rows[t][i]);
    if (s.value() > round_bound) return false;
    if (t < tau) head.add(s.value());
  }
  return head.value() <= 0.0;
}

std::pair<LossStream, int> sample_until_event(const LossSpec& spec, long T,
                                              int max_tries, std::uint64_t seed,
                                              int m, long tau,
                                              double round_bound) {
  if (max_tries < 1)
    throw std::invalid_argument("sample_until_event: max_tries must be >= 1");
  for (int k = 0; k < max_tries; ++k) {
    const std::uint64_t sub = seed + static_cast<std::uint64_t>(k);
    if (event_from_sums(spec, sub, T, m, tau, round_bound)) {
      LossStream s = make_loss_stream(spec, T, sub);
      return {std::move(s), k + 1};
    }
  }
  throw std::runtime_error("sample_until_event: no acceptance in " +
                           std::to_string(max_tries) + " tries");
}

double hardness_event_rate(const LossSpec& spec, long T, int n,
                           std::uint64_t seed, int m, long tau,
                           double round_bound, int jobs) {
  long hits = 0;
#ifdef _OPENMP
  if (jobs > 1) {
#pragma omp parallel for reduction(+ : hits) num_threads(jobs) schedule(dynamic, 16)
    for (int k = 0; k < n; ++k) {
      if (event_from_sums(spec, seed + static_cast<std::uint64_t>(k), T, m, tau,
                          round_bound))
        ++hits;
    }
    return static_cast<double>(hits) / n;
  }
#endif
  (void)jobs;
  for (int k = 0; k < n; ++k) {
    if (event_from_sums(spec, seed + static_cast<std::uint64_t>(k), T, m, tau,
                        round_bound))
      ++hits;
  }
  return static_cast<double>(hits) / n;
}

}  // namespace omdlab
