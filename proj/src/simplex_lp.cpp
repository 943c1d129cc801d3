#include "omdlab/simplex_lp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace omdlab {
namespace {

constexpr double kPivotTol = 1e-11;

// Tableau simplex over [A | b] with cost row appended. Bland's rule keeps it
// cycle-free; fine at these sizes. Columns >= n_scan never enter the basis
// (used to freeze phase-1 artificials during phase 2).
class Tableau {
 public:
  Tableau(const Mat& A, const Vec& b, int n_total)
      : m_(static_cast<int>(A.rows())), n_(n_total), n_scan_(n_total),
        t_(Mat::Zero(A.rows() + 1, n_total + 1)), basis_(A.rows(), -1) {
    t_.block(0, 0, m_, static_cast<int>(A.cols())) = A;
    t_.col(n_).head(m_) = b;
  }

  void set_cost(const Vec& c) {
    t_.row(m_).setZero();
    t_.row(m_).head(c.size()) = c.transpose();
    for (int r = 0; r < m_; ++r) {
      const double cb = (basis_[r] < c.size()) ? c[basis_[r]] : 0.0;
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(r);
    }
  }

  void set_basis(int row, int col) { basis_[row] = col; }
  void restrict_entering(int n_scan) { n_scan_ = n_scan; }

  // Returns false if the problem is unbounded below.
  bool iterate() {
    while (true) {
      int enter = -1;
      for (int j = 0; j < n_scan_; ++j) {
        if (t_(m_, j) < -kPivotTol) { enter = j; break; }  // Bland
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = t_(r, enter);
        if (a > kPivotTol) {
          const double ratio = t_(r, n_) / a;
          if (leave < 0 || ratio < best_ratio - 1e-15 ||
              (std::abs(ratio - best_ratio) <= 1e-15 && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (f != 0.0) t_.row(r) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  double rhs(int row) const { return t_(row, n_); }
  double objective() const { return -t_(m_, n_); }
  int basis(int row) const { return basis_[row]; }
  double entry(int r, int c) const { return t_(r, c); }

 private:
  int m_;
  int n_;
  int n_scan_;
  Mat t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_standard_lp(const Mat& A, const Vec& b, const Vec& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("solve_standard_lp: dimension mismatch");

  Mat A2(m, n + m);
  Vec b2 = b;
  A2.setZero();
  A2.block(0, 0, m, n) = A;
  for (int r = 0; r < m; ++r) {
    if (b2[r] < 0) { A2.row(r) = -A2.row(r); b2[r] = -b2[r]; }
    A2(r, n + r) = 1.0;
  }

  Tableau tab(A2, b2, n + m);
  for (int r = 0; r < m; ++r) tab.set_basis(r, n + r);

  // Phase 1: minimize the sum of artificials.
  Vec phase1 = Vec::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.set_cost(phase1);
  if (!tab.iterate()) throw std::runtime_error("lp: phase 1 unbounded");
  if (tab.objective() > 1e-7)
    throw std::runtime_error("lp: infeasible (phase-1 residual " +
                             std::to_string(tab.objective()) + ")");

  // Drive artificials out of the basis where possible; rows that cannot be
  // pivoted are redundant constraints and stay at zero.
  for (int r = 0; r < m; ++r) {
    if (tab.basis(r) >= n) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.entry(r, j)) > kPivotTol) { tab.pivot(r, j); break; }
      }
    }
  }

  tab.restrict_entering(n);
  Vec phase2 = Vec::Zero(n + m);
  phase2.head(n) = c;
  tab.set_cost(phase2);
  if (!tab.iterate()) throw std::runtime_error("lp: objective unbounded below");

  Vec x = Vec::Zero(n);
  for (int r = 0; r < m; ++r) {
    if (tab.basis(r) < n) x[tab.basis(r)] = std::max(0.0, tab.rhs(r));
  }
  return {x, c.dot(x)};
}

}  // namespace omdlab
