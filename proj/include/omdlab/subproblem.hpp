#ifndef OMDLAB_SUBPROBLEM_HPP
#define OMDLAB_SUBPROBLEM_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "omdlab/geometry.hpp"

namespace omdlab {

// Round objective phi(w) = eta <loss, w> + D_R(w || anchor) over dom.
struct StepObjective {
  double eta;
  Vec loss;
  Point anchor;
  Regularizer reg;
  Domain dom;
};

enum class CertMethod { closed_form, dual_root, fw_gap };

// Machine-checkable evidence that a candidate is an approximate minimizer:
// min_lower_bound is a true lower bound on min phi over the domain, so
// slack = value - lower_bound upper-bounds the candidate's suboptimality.
struct StepCertificate {
  double value_at_candidate = 0.0;
  double min_lower_bound = 0.0;
  double slack = 0.0;
  CertMethod method = CertMethod::closed_form;
  // Set when certification ran at the 1e-12 numeric floor instead of a
  // smaller requested epsilon.
  bool relaxed_tolerance = false;
};

inline const char* cert_method_name(CertMethod m) {
  switch (m) {
    case CertMethod::closed_form: return "closed_form";
    case CertMethod::dual_root: return "dual_root";
    case CertMethod::fw_gap: return "fw_gap";
  }
  return "?";
}

// Numeric resolution of slack certification against O(1) objectives.
constexpr double kCertFloor = 1e-12;

// Largest gamma with x + gamma*dir strictly positive componentwise.
double max_positive_step(const Vec& x, const Vec& dir);

// Compensated evaluation of phi at a feasible point (interior for barrier
// regularizers). Throws with the violated constraint index otherwise.
double objective_eval(const StepObjective& obj, const Point& w);

// eta*loss + grad R(w) - grad R(anchor).
Vec objective_gradient(const StepObjective& obj, const Point& w);

// Exact minimizer over a simplex or interval domain. Negative entropy uses
// the multiplicative-weights closed form in the log domain; other separable
// barriers invert r' coordinate-wise with a bisection on the simplex
// multiplier; the euclidean case is a (projected) gradient step.
std::pair<Point, StepCertificate> exact_step(const StepObjective& obj);

struct PolytopeSolveOptions {
  double gap_target = 1e-12;
  long max_iterations = 1000000;
  // Disable the interior Newton polish and run classic Frank-Wolfe only.
  bool pure_frank_wolfe = false;
  // Kernel basis of dom.A(), computed on demand when absent.
  const std::vector<Vec>* basis = nullptr;
  // Vertex oracle minimizing <c, s> over the polytope; defaults to the
  // dense-simplex LP.
  std::function<Vec(const Vec&)> lmo;
};

// Iterative solve over a standard-form polytope, certified by the
// Frank-Wolfe gap max_s <-grad phi(x), s - x> <= gap_target. Steps are
// damped so no coordinate drops below 1e-3 of its current value.
std::pair<Point, StepCertificate> exact_step_polytope(
    const StepObjective& obj, double gap_target);
std::pair<Point, StepCertificate> exact_step_polytope(
    const StepObjective& obj, const PolytopeSolveOptions& opt);

// Certifies candidate as an eps-minimizer using the best available lower
// bound (closed form, dual root, or a Frank-Wolfe run at gap eps/100).
// For eps below the numeric floor the check runs at the floor and the
// certificate records the relaxation.
std::pair<bool, StepCertificate> certify(const StepObjective& obj,
                                         const Point& candidate, double eps);

// <grad phi(candidate), target - candidate>, asserted to be at least
// -max{ |target-candidate|_1 sqrt(2 beta eps), 2 eps }. Diagnostic for the
// property suite; throws when the approximate optimality condition fails.
double approx_optimality_gap(const StepObjective& obj, const Point& candidate,
                             const Point& target, double eps, double beta);

}  // namespace omdlab

#endif  // OMDLAB_SUBPROBLEM_HPP
