// Timing comparison of the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "omdlab/balance.hpp"
#include "omdlab/instances.hpp"
#include "omdlab/rng.hpp"
#include "omdlab/scenario.hpp"

using namespace omdlab;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_call(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("threads available: %d\n\n", threads);

  {
    const int d = 8;
    const long T = 1 << 15;
    const CounterRng rng(2024);
    std::vector<Vec> losses;
    for (long t = 0; t < T; ++t) {
      Vec l(d);
      for (int i = 0; i < d; ++i)
        l[i] = rng.uniform(static_cast<std::uint64_t>(t) * d + i, -1.0, 1.0);
      losses.push_back(l);
    }
    std::vector<Vec> basis;
    for (int i = 0; i + 1 < d; ++i) {
      Vec v = Vec::Zero(d);
      v[i] = 1;
      v[d - 1] = -1;
      basis.push_back(v);
    }
    volatile double sink = 0;
    const double tp = time_call([&] { sink = loss_balance(losses, basis); });
    const double a_par = loss_balance(losses, basis);
    // reference is O(T^2); time it on a prefix to keep the run short
    std::vector<Vec> head(losses.begin(), losses.begin() + 2048);
    const double ts = time_call([&] { sink = loss_balance_reference(head, basis); });
    const double a_ser = loss_balance_reference(head, basis);
    std::printf("loss_balance        T=%ld d=%d: prefix kernel %.4fs (alpha=%.4f)\n",
                T, d, tp, a_par);
    std::printf("loss_balance_ref    T=%d d=%d: interval scan %.4fs (alpha=%.4f)\n",
                2048, d, ts, a_ser);
    (void)sink;
  }

  {
    LossSpec spec;
    spec.kind = LossKind::gaussian_polytope;
    spec.m = 16;
    spec.eta = 0.1;
    const long T = 3000;
    const double bound = desk_event_round_bound(16, 0.1, T);
    const int n = 4000;
    double r1 = 0, rp = 0;
    const double t1 =
        time_call([&] { r1 = hardness_event_rate(spec, T, n, 1, 16, 30, bound, 1); }, 1);
    const double tp = time_call(
        [&] { rp = hardness_event_rate(spec, T, n, 1, 16, 30, bound, threads); }, 1);
    std::printf("\nhardness_event_rate n=%d: serial %.3fs, %d threads %.3fs "
                "(rates %.4f / %.4f, speedup %.2fx)\n",
                n, t1, threads, tp, r1, rp, t1 / tp);
  }

  return 0;
}
