#ifndef OMDLAB_GEOMETRY_HPP
#define OMDLAB_GEOMETRY_HPP

#include <vector>

#include "omdlab/domain.hpp"
#include "omdlab/regularizer.hpp"
#include "omdlab/types.hpp"

namespace omdlab {

// D_R(w || w') = R(w) - R(w') - <grad R(w'), w - w'>. The second argument
// must be interior for barrier kinds; the first may touch zero coordinates
// (comparator limit form, 0 log 0 = 0), which yields +inf for the
// log-barrier. Uses log-domain coordinates when present.
double bregman(const Regularizer& reg, const Point& w, const Point& w_prev);

// Largest r'' over the per-coordinate segments spanned by w1, w2 (skipping
// equal coordinates); r'' is decreasing for barrier kinds so this is r'' at
// the smaller endpoint. A degenerate pair (w1 == w2) evaluates r'' at the
// point itself; the euclidean kind returns beta outright.
double effective_smoothness(const Regularizer& reg, const Point& w1,
                            const Point& w2);

// Basis of ker(A) for a polytope domain, or the tangent basis
// {e_i - e_d : i < d} for the simplex. Throws for rank-deficient A, naming
// the dependent rows.
std::vector<Vec> kernel_basis(const Domain& dom);

// Gradient of R at a point, in a form safe for tiny entropy coordinates.
Vec regularizer_gradient(const Regularizer& reg, const Point& w);

}  // namespace omdlab

#endif  // OMDLAB_GEOMETRY_HPP
