#ifndef OMDLAB_INSTANCES_HPP
#define OMDLAB_INSTANCES_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "omdlab/domain.hpp"
#include "omdlab/rng.hpp"
#include "omdlab/types.hpp"

namespace omdlab {

enum class LossKind { constant, switching, iid, gaussian_polytope };

// Per-coordinate distribution for iid streams.
struct CoordDist {
  enum class Type { uniform, gaussian } type = Type::uniform;
  double a = -1.0;  // uniform lo / gaussian mean
  double b = 1.0;   // uniform hi / gaussian stddev
};

struct LossSpec {
  LossKind kind = LossKind::constant;
  Vec constant;                                   // constant
  std::vector<std::pair<long, Vec>> phases;       // switching
  std::vector<CoordDist> coords;                  // iid
  int m = 0;                                      // gaussian_polytope block size
  double eta = 0.0;                               // gaussian_polytope mean scale
};

// Realized loss sequence; a pure function of (spec, T, seed).
struct LossStream {
  LossSpec spec;
  long T = 0;
  std::uint64_t seed = 0;
  std::vector<Vec> rows;
  // false when entries may leave [-1,1]^d (gaussian streams)
  bool bounded = true;

  Eigen::Index dim() const { return rows.empty() ? 0 : rows[0].size(); }
};

LossStream make_loss_stream(const LossSpec& spec, long T, std::uint64_t seed);

// CSV audit dump: header "t,l1,...,ld" then one row per round.
void write_loss_csv(const LossStream& stream, std::ostream& out);

// The hard polytope family: d = 5m+2 coordinates, 4m+1 equality rows, and
// the explicit (m+1)-vector kernel basis. Feasible points are exactly
// w1 + sum_i alpha_i v_i with
//   w^i       = 1/d + 3 alpha_i + alpha_{m+1}   (i in [m])
//   w^{m+i} = w^{2m+i} = w^{3m+i} = 1/d - alpha_i
//   w^{4m+i}, w^{5m+1} = 1/d - alpha_{m+1},  w^{5m+2} = 1/d + alpha_{m+1}.
struct HardPolytope {
  int m = 0;
  Eigen::Index d = 0;
  Mat A;
  Vec b;
  Point w1;
  std::vector<Vec> basis;  // v_1..v_m, v_{m+1}
  double tau = 0.0;        // 3/eta
  double eta = 0.0;
  double eps = 0.0;
  // Per-round bound used in the hardness event; m/16 in the asymptotic
  // regime where m >= 128 log(2T).
  double event_round_bound = 0.0;
  // set when d > 1/eta, outside the construction's standing assumption
  bool d_exceeds_inv_eta = false;

  Domain domain() const { return Domain::polytope(A, b); }

  // Exact linear minimization over the polytope (vertex oracle): the
  // feasible alpha-region is a box-like product, so the minimum sits at
  // alpha_{m+1} in {-1/d, 1/d} with per-coordinate alpha_i at a bound.
  Vec lmo(const Vec& c) const;

  // Kernel coefficients of a feasible point (exact inversion through the
  // structure above).
  Vec alpha_of(const Vec& w) const;
  Vec point_of(const Vec& alpha) const;
};

// Builds the family instance for a given approximation error: m =
// ceil(16 log(1/eps)) floored at 8 (and at 128 log(2T) when the asymptotic
// block size is enforced). Validates A v = 0 and feasibility of the uniform
// point.
HardPolytope build_hard_polytope(double eps, double eta,
                                 bool enforce_asymptotic_m = false,
                                 long T_for_asymptotic = 0);

// Hardness event: cumulative block loss over the first tau rounds is <= 0,
// and every per-round block sum stays below round_bound (default m/16).
bool hardness_event(const LossStream& stream, int m, long tau);
bool hardness_event(const LossStream& stream, int m, long tau,
                    double round_bound);

// Rejection sampler conditioning on the event; sub-seed is incremented per
// try. Returns the accepted stream and the number of tries.
std::pair<LossStream, int> sample_until_event(const LossSpec& spec, long T,
                                              int max_tries, std::uint64_t seed,
                                              int m, long tau,
                                              double round_bound);

// Monte-Carlo estimate of Pr(event) over seeds [seed, seed+n); parallelized
// over seeds when jobs > 1 (bit-identical to the serial count).
double hardness_event_rate(const LossSpec& spec, long T, int n,
                           std::uint64_t seed, int m, long tau,
                           double round_bound, int jobs);

}  // namespace omdlab

#endif  // OMDLAB_INSTANCES_HPP
