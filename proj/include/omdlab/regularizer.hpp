#ifndef OMDLAB_REGULARIZER_HPP
#define OMDLAB_REGULARIZER_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "omdlab/types.hpp"

namespace omdlab {

enum class RegKind { euclidean, neg_entropy, tsallis, log_barrier, custom_barrier };

struct ScalarDerivatives {
  double r;
  double r1;
  double r2;
};

// Coordinate-separable regularizer r applied per coordinate, or the quadratic
// (beta/2)|w|^2. Barrier kinds satisfy c1/x^nu <= r''(x) <= c2/x^nu on (0,1].
class Regularizer {
 public:
  using ScalarFn = std::function<double(double)>;

  static Regularizer euclidean(double beta) {
    if (beta <= 0) throw std::invalid_argument("euclidean: beta must be > 0");
    Regularizer r;
    r.kind_ = RegKind::euclidean;
    r.beta_ = beta;
    return r;
  }

  static Regularizer neg_entropy() {
    Regularizer r;
    r.kind_ = RegKind::neg_entropy;
    r.nu_ = 1.0;
    r.c1_ = 1.0;
    r.c2_ = 1.0;
    return r;
  }

  // r(x) = (x - x^q)/(1 - q);  r''(x) = q x^(q-2) = q / x^(2-q) exactly,
  // so (nu, c1, c2) = (2-q, q, q).
  static Regularizer tsallis(double q) {
    if (q <= 0.0 || q >= 1.0)
      throw std::invalid_argument("tsallis: q must lie in (0,1)");
    Regularizer r;
    r.kind_ = RegKind::tsallis;
    r.q_ = q;
    r.nu_ = 2.0 - q;
    r.c1_ = q;
    r.c2_ = q;
    return r;
  }

  static Regularizer log_barrier() {
    Regularizer r;
    r.kind_ = RegKind::log_barrier;
    r.nu_ = 2.0;
    r.c1_ = 1.0;
    r.c2_ = 1.0;
    return r;
  }

  static Regularizer custom_barrier(ScalarFn r, ScalarFn r1, ScalarFn r2,
                                    double nu, double c1, double c2) {
    if (nu < 1.0 || c1 <= 0.0 || c2 <= 0.0 || c1 > c2)
      throw std::invalid_argument("custom_barrier: need nu >= 1, 0 < c1 <= c2");
    Regularizer reg;
    reg.kind_ = RegKind::custom_barrier;
    reg.fr_ = std::move(r);
    reg.fr1_ = std::move(r1);
    reg.fr2_ = std::move(r2);
    reg.nu_ = nu;
    reg.c1_ = c1;
    reg.c2_ = c2;
    return reg;
  }

  RegKind kind() const { return kind_; }
  bool is_barrier() const { return kind_ != RegKind::euclidean; }
  bool separable() const { return true; }  // euclidean is separable too
  double beta() const { return beta_; }
  double q() const { return q_; }
  double nu() const { return nu_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  ScalarDerivatives derivatives(double x) const {
    check_domain(x);
    switch (kind_) {
      case RegKind::euclidean:
        return {0.5 * beta_ * x * x, beta_ * x, beta_};
      case RegKind::neg_entropy:
        return {x * std::log(x), std::log(x) + 1.0, 1.0 / x};
      case RegKind::tsallis: {
        const double xq = std::pow(x, q_);
        return {(x - xq) / (1.0 - q_),
                (1.0 - q_ * xq / x) / (1.0 - q_),
                q_ * xq / (x * x)};
      }
      case RegKind::log_barrier:
        return {-std::log(x), -1.0 / x, 1.0 / (x * x)};
      case RegKind::custom_barrier:
        return {fr_(x), fr1_(x), fr2_(x)};
    }
    throw std::logic_error("unreachable");
  }

  double r(double x) const { return derivatives(x).r; }

  double r1(double x) const {
    check_domain(x);
    switch (kind_) {
      case RegKind::euclidean: return beta_ * x;
      case RegKind::neg_entropy: return std::log(x) + 1.0;
      case RegKind::tsallis: return (1.0 - q_ * std::pow(x, q_ - 1.0)) / (1.0 - q_);
      case RegKind::log_barrier: return -1.0 / x;
      case RegKind::custom_barrier: return fr1_(x);
    }
    throw std::logic_error("unreachable");
  }

  double r2(double x) const {
    check_domain(x);
    switch (kind_) {
      case RegKind::euclidean: return beta_;
      case RegKind::neg_entropy: return 1.0 / x;
      case RegKind::tsallis: return q_ * std::pow(x, q_ - 2.0);
      case RegKind::log_barrier: return 1.0 / (x * x);
      case RegKind::custom_barrier: return fr2_(x);
    }
    throw std::logic_error("unreachable");
  }

  // r1 computed from a log-domain coordinate, avoiding exp() underflow for
  // entropy (r'(x) = log x + 1 needs only log x).
  double r1_from_log(double log_x) const {
    if (kind_ == RegKind::neg_entropy) return log_x + 1.0;
    return r1(std::exp(log_x));
  }

  // Inverse of r' on (0, x_max]; r' is strictly increasing for all kinds.
  // Throws if g is below the range (the barrier pole); values above
  // r'(x_max) clamp to x_max when clamp_high is set.
  double r1_inverse(double g, double x_max, bool clamp_high) const {
    switch (kind_) {
      case RegKind::euclidean: {
        const double x = g / beta_;
        if (x <= 0) throw std::domain_error("r1_inverse: g below range");
        return (clamp_high && x > x_max) ? x_max : x;
      }
      case RegKind::neg_entropy: {
        const double x = std::exp(g - 1.0);
        return (clamp_high && x > x_max) ? x_max : x;
      }
      case RegKind::tsallis: {
        // q x^(q-1) = 1 - (1-q) g
        const double rhs = 1.0 - (1.0 - q_) * g;
        if (rhs <= 0) {
          if (clamp_high) return x_max;
          throw std::domain_error("r1_inverse: g above tsallis range");
        }
        const double x = std::pow(rhs / q_, 1.0 / (q_ - 1.0));
        return (clamp_high && x > x_max) ? x_max : x;
      }
      case RegKind::log_barrier: {
        if (g >= 0) {
          if (clamp_high) return x_max;
          throw std::domain_error("r1_inverse: g above log-barrier range");
        }
        const double x = -1.0 / g;
        return (clamp_high && x > x_max) ? x_max : x;
      }
      case RegKind::custom_barrier:
        return r1_inverse_bisect(g, x_max, clamp_high);
    }
    throw std::logic_error("unreachable");
  }

  std::string name() const {
    switch (kind_) {
      case RegKind::euclidean: return "euclidean";
      case RegKind::neg_entropy: return "neg_entropy";
      case RegKind::tsallis: return "tsallis";
      case RegKind::log_barrier: return "log_barrier";
      case RegKind::custom_barrier: return "custom_barrier";
    }
    return "?";
  }

  // Separable sum R(w); barrier kinds require strictly positive coords.
  double value(const Vec& w) const {
    KahanSum s;
    for (Eigen::Index i = 0; i < w.size(); ++i) s.add(r(w[i]));
    return s.value();
  }

  Vec gradient(const Vec& w) const {
    Vec g(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) g[i] = r1(w[i]);
    return g;
  }

 private:
  void check_domain(double x) const {
    if (is_barrier() && x <= 0.0)
      throw std::domain_error(name() + ": x must be > 0, got " + std::to_string(x));
  }

  double r1_inverse_bisect(double g, double x_max, bool clamp_high) const {
    double hi = x_max;
    if (fr1_(hi) < g) {
      if (clamp_high) return x_max;
      // expand upward: custom barriers are defined past 1 in practice
      for (int k = 0; k < 60 && fr1_(hi) < g; ++k) hi *= 2.0;
      if (fr1_(hi) < g) throw std::domain_error("r1_inverse: g above range");
    }
    double lo = hi;
    while (fr1_(lo) > g) {
      lo *= 0.5;
      if (lo < 1e-300) throw std::domain_error("r1_inverse: g below range");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fr1_(mid) <= g ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  RegKind kind_ = RegKind::neg_entropy;
  double beta_ = 1.0;
  double q_ = 0.5;
  double nu_ = 1.0;
  double c1_ = 1.0;
  double c2_ = 1.0;
  ScalarFn fr_, fr1_, fr2_;
};

}  // namespace omdlab

#endif  // OMDLAB_REGULARIZER_HPP
