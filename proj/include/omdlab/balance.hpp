#ifndef OMDLAB_BALANCE_HPP
#define OMDLAB_BALANCE_HPP

#include <vector>

#include "omdlab/trajectory.hpp"

namespace omdlab {

// B^v(t1,t2) = <grad R(w_t1) - grad R(w_t2), v> evaluated over a kernel
// basis and a time grid. k_balanced_at is taken over the supplied
// L1-normalized vectors, which is exact for the simplex family and a lower
// bound on the continuum value for general polytopes.
struct BalanceReport {
  struct Entry {
    int v_index;
    long t1;
    long t2;
    double value;
  };
  std::vector<Entry> per_pair;
  double max_over_pairs = 0.0;
  double k_balanced_at = 0.0;
};

// Balance of a trajectory with respect to one kernel vector and a time pair
// (iterates are 1-indexed: t in [1, T+1]). Checks v against ker(A) and uses
// log-domain gradients for entropy.
double trajectory_balance(const Trajectory& traj, const Regularizer& reg,
                          const Domain& dom, const Vec& v, long t1, long t2);

BalanceReport balance_report(const Trajectory& traj, const Regularizer& reg,
                             const Domain& dom, const std::vector<Vec>& basis,
                             const std::vector<long>& time_grid);

// Smallest alpha with <l_{t1:t2}, v> <= alpha ||v|| over every interval and
// +/- every basis vector; reduced to prefix-sum extremes, O(T) per vector.
// The basis is L1-normalized internally.
double loss_balance(const std::vector<Vec>& losses,
                    const std::vector<Vec>& basis);
// Direct O(T^2) interval enumeration; serial reference for the kernel above.
double loss_balance_reference(const std::vector<Vec>& losses,
                              const std::vector<Vec>& basis);

// psi(nu, c1, eta, T, d) = (c1 / (8 eta T d + c1 (2d)^(nu-1)))^(1/(nu-1));
// the iterate floor for nu > 1 barriers. Throws for nu = 1.
double psi_floor(double nu, double c1, double eta, long T, Eigen::Index d);

// Asserts -r'(w_t^i) <= max{4kd - r'(1/d), -r'(1/2d)} for every (t, i) of a
// k-balanced trajectory initialized at uniform; returns the tightest margin
// (bound minus value). Throws listing (t, i, margin) on violation.
double entropy_gradient_ceiling(const Trajectory& traj, const Regularizer& reg,
                                double k);

// Simplex coordinate-bound implications for v = e_{i_star} - e_i given
// B^i(t1, t2) <= k:
//   (1) w_t2^i >= w_t1^i      implies e^{k/c1} w_t2^{i*} >= w_t1^{i*}
//   (2) w_t2^{i*} <= w_t1^{i*} implies w_t2^i <= e^{k/c1} w_t1^i
bool simplex_coordinate_bounds_check(const Trajectory& traj,
                                     const Regularizer& reg, Eigen::Index i,
                                     Eigen::Index i_star, long t1, long t2,
                                     double k);

// (4 eta / c1) w^nu <= eps: freezing coordinate w remains a valid
// eps-approximate continuation (d=2 setting).
bool stuck_criterion(const Regularizer& reg, double w, double eta, double eps);

// Audits of the step-size bounds over a produced trajectory; throw on
// violation, return the tightest margin otherwise.
// |w_t^i - w_{t+1}^i| < 4 eta/h + sqrt(eps/h), h = min r'' at the endpoints
// (requires eta <= 1/4).
double audit_max_step(const Trajectory& traj, const Regularizer& reg);
// whenever eps <= (w_t^i)^nu/(16 c1) and eta <= 1/(16 c1):
// w_{t+1}^i >= w_t^i / 2 and w_{t-1}^i >= w_t^i / 2.
double audit_not_too_far(const Trajectory& traj, const Regularizer& reg);

}  // namespace omdlab

#endif  // OMDLAB_BALANCE_HPP
