#ifndef OMDLAB_TRAJECTORY_HPP
#define OMDLAB_TRAJECTORY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "omdlab/instances.hpp"
#include "omdlab/subproblem.hpp"

namespace omdlab {

enum class TrajKind { exact, honest, adversarial, ftrl };
enum class NoisePolicy { tight, saturating };

// A full run: T+1 iterates (w_1 first), T losses, and one certificate per
// round against that round's objective.
struct Trajectory {
  std::vector<Point> iterates;
  std::vector<Vec> losses;
  double eta = 0.0;
  double eps = 0.0;
  std::vector<StepCertificate> certificates;
  TrajKind kind = TrajKind::exact;
  // saturating-noise rounds that fell back to the tight policy
  bool fallback_warning = false;

  long rounds() const { return static_cast<long>(losses.size()); }
  double max_slack() const;
};

struct RegretReport {
  double cumulative_loss = 0.0;
  double comparator_loss = 0.0;
  double regret = 0.0;
  Point comparator;
  std::vector<double> per_round_regret;
};

// Exact OMD: every round solved to certificate slack <= 1e-10 (1e-12 gap
// target on polytopes).
Trajectory run_exact(const Domain& dom, const Regularizer& reg,
                     const std::vector<Vec>& losses, double eta,
                     const Point& w1);

// Honest eps-approximate OMD. tight solves each round exactly; saturating
// perturbs the exact solution along a random feasible kernel direction until
// the certified slack lands in [eps/2, eps] (falling back to tight, with a
// flag, when the band is unreachable). Requires eps >= 1e-12.
Trajectory run_honest_inexact(const Domain& dom, const Regularizer& reg,
                              const std::vector<Vec>& losses, double eta,
                              double eps, const Point& w1, NoisePolicy policy,
                              std::uint64_t seed = 0);

// Constant-loss stuck trajectory on [0,D] with the euclidean regularizer:
// l = min{sqrt(2 beta eps)/eta, 1}, all iterates at D/2, every step
// certified with slack eta^2 l^2 / (2 beta) <= eps.
Trajectory build_smooth_stuck(double D, double beta, double eps, double eta,
                              long T);

// d=2 entropy instance: losses (1,0) for tau = ceil(log(4 eta/eps)/eta)
// rounds, then (0,1); exact until tau, frozen afterwards. Frozen rounds must
// pass the analytic stuck criterion, and numeric certification when eps is
// above the certification floor.
Trajectory build_entropy_stuck(double alpha, double eps, double eta, long T);

// Frozen-at-uniform trajectory under losses (1,...,1,0); requires
// eps >= 4 eta^2 / (c1 d^nu).
Trajectory build_dimension_stuck(const Regularizer& reg, Eigen::Index d,
                                 double eps, double eta, long T);

// The hard-polytope construction: exact OMD (negative entropy) for
// tau = 3/eta rounds, then each round takes the exact step and resets the
// v_{m+1} kernel coefficient to its previous value. Every modified step is
// certified against the exact solve's lower bound. The supplied stream must
// satisfy the hardness event recorded in `hard`.
Trajectory build_polytope_stuck(const HardPolytope& hard,
                                const LossStream& losses, double eta,
                                double eps);

// Approximate FTRL over the simplex: round t eps-minimizes
// eta <l_{1:t}, w> + R(w). Certificates are relative to that objective.
Trajectory run_ftrl_approx(const Domain& dom, const Regularizer& reg,
                           const std::vector<Vec>& losses, double eta,
                           double eps, NoisePolicy policy,
                           std::uint64_t seed = 0);

// Regret versus the given comparator, or best-in-hindsight when absent
// (lowest-index argmin coordinate on the simplex, better endpoint on an
// interval, LP vertex on a polytope).
RegretReport regret(const Trajectory& traj, const Domain& dom,
                    const std::optional<Point>& comparator = std::nullopt);

}  // namespace omdlab

#endif  // OMDLAB_TRAJECTORY_HPP
