#ifndef OMDLAB_SCENARIO_HPP
#define OMDLAB_SCENARIO_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "omdlab/balance.hpp"
#include "omdlab/trajectory.hpp"

namespace omdlab {

// A named, fully parameterized experiment. Serialized as flat INI-style
// sections; parse(serialize(s)) round-trips.
struct Scenario {
  std::string name;
  std::string runner;  // exact | honest_tight | honest_saturating | ftrl |
                       // adversarial_{smooth,entropy,dimension,polytope}_stuck |
                       // adversarial_double_switch
  double eta = 0.1;
  double eps = 1e-6;
  long T = 100;
  std::vector<std::uint64_t> seeds;

  std::string domain_kind = "simplex";  // simplex | interval | hard_polytope
  long d = 2;
  double lo = 0.0, hi = 1.0;

  std::string reg_kind = "neg_entropy";  // neg_entropy|euclidean|tsallis|log_barrier
  double beta = 1.0;
  double q = 0.5;

  // constructor-owned runners carry loss_kind = "constructor"
  std::string loss_kind = "constructor";  // constant|switching|iid_uniform|
                                          // gaussian_polytope|constructor
  Vec constant_loss;
  std::vector<std::pair<long, Vec>> phases;
  double iid_lo = -1.0, iid_hi = 1.0;

  double alpha = 0.0;     // entropy_stuck balance parameter
  double D = 1.0;         // smooth_stuck interval width
  double k_switch = 0.0;  // double_switch balance parameter

  bool trace_csv = true;
  bool summary_csv = true;
  bool regret_svg = false;
};

Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);
Scenario load_scenario_file(const std::string& path);

// Precondition checks for the chosen runner; throws std::invalid_argument
// naming the violated threshold formula. Runs at the top of run_scenario.
void validate_scenario(const Scenario& s);

// Closed-form robustness thresholds used by the presets, evaluated at run
// time: the largest approximation error under which the nu>1 barrier (resp.
// entropy) regret guarantee is proven to survive.
double barrier_robust_epsilon(const Regularizer& reg, double eta, long T, long d);
double entropy_robust_epsilon(double eta, long T, long d);
double smooth_regret_bound(double D, double beta, double eps, double eta,
                           long T, double bregman_to_start);
double ftrl_regret_bound(double eps, double eta, long T, double reg_span);

// Desk-scale per-round bound for the hardness event: the asymptotic m/16
// has vanishing probability at small m, so the bound falls back to the
// gaussian-tail value mean + sqrt(2 (m+1) log(2T)) when that is larger.
double desk_event_round_bound(int m, double eta, long T);

// Double-switch adversarial instance, scripted from exact steps, the stuck
// criterion, and per-round certification (eps = 4 eta e^{-k/2}).
Trajectory build_double_switch(double k, double eta, long T);

struct CellResult {
  std::uint64_t seed = 0;
  double final_regret = 0.0;
  double max_slack = 0.0;
  double min_coord = 1.0;
  double loss_alpha = 0.0;
  bool fallback = false;
  int event_tries = 0;
  std::vector<double> cum_regret;     // per round
  std::vector<double> loss_dot_w;     // per round
  std::vector<double> min_coord_t;    // per round
  std::vector<double> max_slack_t;    // per round
  std::vector<double> balance_stat_t; // per round
};

struct ScenarioResult {
  std::vector<CellResult> cells;
  std::vector<std::string> failures;  // failed scenario assertions
  double event_rate = -1.0;           // polytope runs only
};

// Validates preconditions (naming the violated threshold formula), executes
// all seeds (parallel across a pool of `jobs`), evaluates the scenario's
// assertions, and writes the requested outputs. Returns 0 on success, 2 when
// an assertion failed, and throws std::invalid_argument for config errors
// (the CLI maps those to exit code 1). No partial outputs are written.
int run_scenario(const Scenario& s, const std::string& out_dir, int jobs,
                 ScenarioResult* out = nullptr);

// Self-contained SVG: one polyline per seed plus a bold mean curve.
std::string emit_svg(const Scenario& s,
                     const std::vector<std::vector<double>>& cum_regret_per_seed);

Scenario preset(const std::string& name);
std::vector<std::string> list_presets();

}  // namespace omdlab

#endif  // OMDLAB_SCENARIO_HPP
