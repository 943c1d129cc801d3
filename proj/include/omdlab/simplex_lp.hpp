#ifndef OMDLAB_SIMPLEX_LP_HPP
#define OMDLAB_SIMPLEX_LP_HPP

#include "omdlab/types.hpp"

namespace omdlab {

struct LpResult {
  Vec x;
  double objective;
};

// Minimize c'x subject to Ax = b, x >= 0, via a dense two-phase primal
// simplex method with Bland's rule. Intended for the small vertex oracles
// used here (tens of rows); throws on infeasibility or unboundedness.
LpResult solve_standard_lp(const Mat& A, const Vec& b, const Vec& c);

}  // namespace omdlab

#endif  // OMDLAB_SIMPLEX_LP_HPP
