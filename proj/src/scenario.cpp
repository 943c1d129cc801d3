#include "omdlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "omdlab/geometry.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace omdlab {
namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_vec(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

Vec parse_vec(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_ini(const std::string& text) {
  SectionMap out;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  long lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      out[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    out[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

const std::string* find(const SectionMap& m, const std::string& sec,
                        const std::string& key) {
  const auto s = m.find(sec);
  if (s == m.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

double get_num(const SectionMap& m, const std::string& sec,
               const std::string& key, double dflt) {
  const auto* v = find(m, sec, key);
  return v ? std::stod(*v) : dflt;
}

std::string get_str(const SectionMap& m, const std::string& sec,
                    const std::string& key, const std::string& dflt) {
  const auto* v = find(m, sec, key);
  return v ? *v : dflt;
}

Regularizer make_reg(const Scenario& s) {
  if (s.reg_kind == "neg_entropy") return Regularizer::neg_entropy();
  if (s.reg_kind == "euclidean") return Regularizer::euclidean(s.beta);
  if (s.reg_kind == "tsallis") return Regularizer::tsallis(s.q);
  if (s.reg_kind == "log_barrier") return Regularizer::log_barrier();
  throw std::invalid_argument("unknown regularizer kind '" + s.reg_kind + "'");
}

bool runner_known(const std::string& r) {
  static const char* names[] = {
      "exact", "honest_tight", "honest_saturating", "ftrl",
      "adversarial_smooth_stuck", "adversarial_entropy_stuck",
      "adversarial_dimension_stuck", "adversarial_polytope_stuck",
      "adversarial_double_switch"};
  for (const char* n : names)
    if (r == n) return true;
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// thresholds

double barrier_robust_epsilon(const Regularizer& reg, double eta, long T, long d) {
  const double nu = reg.nu(), c1 = reg.c1(), c2 = reg.c2();
  const double inner = 16.0 * eta * T * d / c1 +
                       2.0 * std::pow(2.0 * static_cast<double>(d), nu - 1.0);
  return std::pow(eta, 4.0) * std::min(c2, 1.0 / c2) *
         std::pow(inner, -nu / (nu - 1.0));
}

double entropy_robust_epsilon(double eta, long T, long d) {
  return 1.0 / (6.0 * d) * std::exp(-eta * T / 2.0) *
         std::min(std::pow(eta, 4.0), 1.0 / (static_cast<double>(T) * T));
}

double smooth_regret_bound(double D, double beta, double eps, double eta,
                           long T, double bregman_to_start) {
  return bregman_to_start / eta + 2.0 * eta * T +
         2.0 * T * D * std::sqrt(beta * eps) / eta;
}

double ftrl_regret_bound(double eps, double eta, long T, double reg_span) {
  return reg_span / eta + (2.0 * eta + std::sqrt(2.0 * eps)) * T;
}

double desk_event_round_bound(int m, double eta, long T) {
  const double d = 5.0 * m + 2.0;
  const double mean = std::min(std::sqrt(eta * d), 1.0);
  const double tail = std::sqrt(2.0 * (m + 1.0) * std::log(2.0 * T));
  return std::max(m / 16.0, mean + tail);
}

// ---------------------------------------------------------------------------
// double-switch instance

Trajectory build_double_switch(double k, double eta, long T) {
  if (k > T * eta / 20.0 + 1e-12)
    throw std::invalid_argument(
        "build_double_switch: requires k <= T*eta/20");
  const double eps = 4.0 * eta * std::exp(-k / 2.0);
  const long tau = static_cast<long>(std::ceil(k / (2.0 * eta)));
  const long p1 = 3 * tau;       // (0,1) losses
  const long p2 = 2 * tau;       // (1,0) losses
  if (p1 + p2 >= T)
    throw std::invalid_argument("build_double_switch: T too small for phases");

  const Domain dom = Domain::simplex(2);
  const Regularizer reg = Regularizer::neg_entropy();
  Vec l01(2), l10(2);
  l01 << 0.0, 1.0;
  l10 << 1.0, 0.0;

  Trajectory traj;
  traj.kind = TrajKind::adversarial;
  traj.eta = eta;
  traj.eps = eps;
  traj.iterates.push_back(uniform_point(2));

  const auto exact_round = [&](const Vec& loss) {
    traj.losses.push_back(loss);
    StepObjective obj{eta, loss, traj.iterates.back(), reg, dom};
    auto [w, cert] = exact_step(obj);
    traj.certificates.push_back(cert);
    traj.iterates.push_back(std::move(w));
  };
  const auto frozen_round = [&](const Vec& loss, const Point& frozen,
                                Eigen::Index small_coord) {
    traj.losses.push_back(loss);
    if (!stuck_criterion(reg, frozen.coords[small_coord], eta, eps))
      throw std::runtime_error("build_double_switch: stuck criterion fails");
    StepObjective obj{eta, loss, frozen, reg, dom};
    auto [ok, cert] = certify(obj, frozen, eps);
    if (!ok)
      throw std::runtime_error("build_double_switch: frozen round fails certification");
    traj.certificates.push_back(cert);
    traj.iterates.push_back(frozen);
  };

  for (long t = 0; t < tau; ++t) exact_round(l01);
  const Point f1 = traj.iterates.back();
  for (long t = tau; t < p1; ++t) frozen_round(l01, f1, 1);
  for (long t = p1; t < p1 + p2; ++t) exact_round(l10);
  const Point f2 = traj.iterates.back();
  for (long t = p1 + p2; t < T; ++t) frozen_round(l01, f2, 0);
  return traj;
}

// ---------------------------------------------------------------------------
// config

Scenario parse_scenario(const std::string& text) {
  const SectionMap m = parse_ini(text);
  Scenario s;
  s.name = get_str(m, "scenario", "name", "");
  s.runner = get_str(m, "scenario", "runner", "exact");
  s.eta = get_num(m, "scenario", "eta", 0.1);
  s.eps = get_num(m, "scenario", "eps", 1e-6);
  s.T = static_cast<long>(get_num(m, "scenario", "T", 100));
  if (const auto* v = find(m, "scenario", "seeds")) {
    std::stringstream ss(*v);
    std::string tok;
    while (std::getline(ss, tok, ',')) s.seeds.push_back(std::stoull(trim(tok)));
  }

  s.domain_kind = get_str(m, "domain", "kind", "simplex");
  s.d = static_cast<long>(get_num(m, "domain", "d", 2));
  s.lo = get_num(m, "domain", "lo", 0.0);
  s.hi = get_num(m, "domain", "hi", 1.0);

  s.reg_kind = get_str(m, "regularizer", "kind", "neg_entropy");
  s.beta = get_num(m, "regularizer", "beta", 1.0);
  s.q = get_num(m, "regularizer", "q", 0.5);

  s.loss_kind = get_str(m, "losses", "kind", "constructor");
  if (const auto* v = find(m, "losses", "values")) s.constant_loss = parse_vec(*v);
  if (const auto* v = find(m, "losses", "phases")) {
    std::stringstream ss(*v);
    std::string ph;
    while (std::getline(ss, ph, ';')) {
      const auto colon = ph.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("losses.phases: expected len:v1,v2,...");
      s.phases.emplace_back(std::stol(trim(ph.substr(0, colon))),
                            parse_vec(trim(ph.substr(colon + 1))));
    }
  }
  s.iid_lo = get_num(m, "losses", "lo", -1.0);
  s.iid_hi = get_num(m, "losses", "hi", 1.0);

  s.alpha = get_num(m, "params", "alpha", 0.0);
  s.D = get_num(m, "params", "D", 1.0);
  s.k_switch = get_num(m, "params", "k", 0.0);

  s.trace_csv = get_str(m, "outputs", "trace_csv", "true") == "true";
  s.summary_csv = get_str(m, "outputs", "summary_csv", "true") == "true";
  s.regret_svg = get_str(m, "outputs", "regret_svg", "false") == "true";
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "name = " << s.name << "\n";
  out << "runner = " << s.runner << "\n";
  out << "eta = " << fmt(s.eta) << "\n";
  out << "eps = " << fmt(s.eps) << "\n";
  out << "T = " << s.T << "\n";
  out << "seeds = ";
  for (size_t i = 0; i < s.seeds.size(); ++i)
    out << (i ? "," : "") << s.seeds[i];
  out << "\n\n[domain]\n";
  out << "kind = " << s.domain_kind << "\n";
  if (s.domain_kind == "simplex") out << "d = " << s.d << "\n";
  if (s.domain_kind == "interval")
    out << "lo = " << fmt(s.lo) << "\nhi = " << fmt(s.hi) << "\n";
  out << "\n[regularizer]\n";
  out << "kind = " << s.reg_kind << "\n";
  if (s.reg_kind == "euclidean") out << "beta = " << fmt(s.beta) << "\n";
  if (s.reg_kind == "tsallis") out << "q = " << fmt(s.q) << "\n";
  out << "\n[losses]\n";
  out << "kind = " << s.loss_kind << "\n";
  if (s.loss_kind == "constant")
    out << "values = " << fmt_vec(s.constant_loss) << "\n";
  if (s.loss_kind == "switching") {
    out << "phases = ";
    for (size_t i = 0; i < s.phases.size(); ++i) {
      if (i) out << ';';
      out << s.phases[i].first << ':' << fmt_vec(s.phases[i].second);
    }
    out << "\n";
  }
  if (s.loss_kind == "iid_uniform")
    out << "lo = " << fmt(s.iid_lo) << "\nhi = " << fmt(s.iid_hi) << "\n";
  out << "\n[params]\n";
  if (s.runner == "adversarial_entropy_stuck")
    out << "alpha = " << fmt(s.alpha) << "\n";
  if (s.runner == "adversarial_smooth_stuck") out << "D = " << fmt(s.D) << "\n";
  if (s.runner == "adversarial_double_switch")
    out << "k = " << fmt(s.k_switch) << "\n";
  out << "\n[outputs]\n";
  out << "trace_csv = " << (s.trace_csv ? "true" : "false") << "\n";
  out << "summary_csv = " << (s.summary_csv ? "true" : "false") << "\n";
  out << "regret_svg = " << (s.regret_svg ? "true" : "false") << "\n";
  return out.str();
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// ---------------------------------------------------------------------------
// validation

namespace {

void validate(const Scenario& s) {
  if (!runner_known(s.runner))
    throw std::invalid_argument("unknown runner '" + s.runner + "'");
  if (s.seeds.empty()) throw std::invalid_argument("seed list is empty");
  if (s.T < 1) throw std::invalid_argument("T must be >= 1");
  if (!(s.eta > 0)) throw std::invalid_argument("eta must be > 0");

  const bool honest = s.runner == "honest_tight" ||
                      s.runner == "honest_saturating" || s.runner == "ftrl";
  if (honest && s.eps < kCertFloor)
    throw std::invalid_argument(
        "runner '" + s.runner +
        "' requires eps >= 1e-12 (certified slack floor; below numeric resolution)");

  if (s.runner == "adversarial_smooth_stuck") {
    if (s.domain_kind != "interval" || s.reg_kind != "euclidean")
      throw std::invalid_argument(
          "adversarial_smooth_stuck needs interval domain + euclidean regularizer");
  }
  if (s.runner == "adversarial_entropy_stuck") {
    const double thr = 4.0 * s.eta * std::exp(-s.eta * s.alpha);
    if (s.eps < thr * (1 - 1e-12))
      throw std::invalid_argument(
          "adversarial_entropy_stuck: violates eps >= 4*eta*exp(-eta*alpha) = " +
          fmt(thr) + " (entropy fragility threshold)");
    if (s.alpha > s.T / 2.0)
      throw std::invalid_argument("adversarial_entropy_stuck: requires alpha <= T/2");
  }
  if (s.runner == "adversarial_dimension_stuck") {
    const Regularizer reg = make_reg(s);
    const double thr =
        4.0 * s.eta * s.eta /
        (reg.c1() * std::pow(static_cast<double>(s.d), reg.nu()));
    if (s.eps < thr * (1 - 1e-12))
      throw std::invalid_argument(
          "adversarial_dimension_stuck: violates eps >= 4*eta^2/(c1*d^nu) = " +
          fmt(thr) + " (dimension lower-bound threshold)");
  }
  if (s.runner == "adversarial_polytope_stuck") {
    if (!(s.eps < 4 * s.eta))
      throw std::invalid_argument(
          "adversarial_polytope_stuck: violates eps < 4*eta (standing assumption)");
    if (s.domain_kind != "hard_polytope")
      throw std::invalid_argument(
          "adversarial_polytope_stuck needs domain kind hard_polytope");
  }
  if (s.runner == "adversarial_double_switch") {
    if (s.k_switch > s.T * s.eta / 20.0 + 1e-12)
      throw std::invalid_argument(
          "adversarial_double_switch: violates k <= T*eta/20");
  }
}

std::vector<Vec> scenario_losses(const Scenario& s, std::uint64_t seed) {
  LossSpec spec;
  if (s.loss_kind == "constant") {
    spec.kind = LossKind::constant;
    spec.constant = s.constant_loss;
  } else if (s.loss_kind == "switching") {
    spec.kind = LossKind::switching;
    spec.phases = s.phases;
  } else if (s.loss_kind == "iid_uniform") {
    spec.kind = LossKind::iid;
    spec.coords.assign(s.d, CoordDist{CoordDist::Type::uniform, s.iid_lo, s.iid_hi});
  } else {
    throw std::invalid_argument("loss kind '" + s.loss_kind +
                                "' not realizable outside its constructor");
  }
  return make_loss_stream(spec, s.T, seed).rows;
}

struct ScenarioContext {
  Domain dom;
  Regularizer reg;
  std::vector<Vec> basis;        // kernel basis for balance stats (may be empty)
  const HardPolytope* hard = nullptr;
};

CellResult run_cell(const Scenario& s, const ScenarioContext& ctx,
                    std::uint64_t seed) {
  CellResult cell;
  cell.seed = seed;

  Trajectory traj;
  if (s.runner == "exact") {
    traj = run_exact(ctx.dom, ctx.reg, scenario_losses(s, seed), s.eta,
                     Point::from_coords(ctx.dom.center()));
  } else if (s.runner == "honest_tight" || s.runner == "honest_saturating") {
    const auto policy = s.runner == "honest_tight" ? NoisePolicy::tight
                                                   : NoisePolicy::saturating;
    traj = run_honest_inexact(ctx.dom, ctx.reg, scenario_losses(s, seed), s.eta,
                              s.eps, Point::from_coords(ctx.dom.center()), policy,
                              seed);
  } else if (s.runner == "ftrl") {
    traj = run_ftrl_approx(ctx.dom, ctx.reg, scenario_losses(s, seed), s.eta,
                           s.eps, NoisePolicy::saturating, seed);
  } else if (s.runner == "adversarial_smooth_stuck") {
    traj = build_smooth_stuck(s.D, s.beta, s.eps, s.eta, s.T);
  } else if (s.runner == "adversarial_entropy_stuck") {
    traj = build_entropy_stuck(s.alpha, s.eps, s.eta, s.T);
  } else if (s.runner == "adversarial_dimension_stuck") {
    traj = build_dimension_stuck(ctx.reg, s.d, s.eps, s.eta, s.T);
  } else if (s.runner == "adversarial_polytope_stuck") {
    LossSpec spec;
    spec.kind = LossKind::gaussian_polytope;
    spec.m = ctx.hard->m;
    spec.eta = s.eta;
    auto [stream, tries] = sample_until_event(
        spec, s.T, 100000, seed * 1000003ULL, ctx.hard->m,
        static_cast<long>(std::ceil(ctx.hard->tau)), ctx.hard->event_round_bound);
    cell.event_tries = tries;
    traj = build_polytope_stuck(*ctx.hard, stream, s.eta, s.eps);
  } else if (s.runner == "adversarial_double_switch") {
    traj = build_double_switch(s.k_switch, s.eta, s.T);
  } else {
    throw std::invalid_argument("unknown runner '" + s.runner + "'");
  }

  const RegretReport rep = regret(traj, ctx.dom);
  cell.final_regret = rep.regret;
  cell.max_slack = traj.max_slack();
  cell.fallback = traj.fallback_warning;

  // per-round trace
  const long T = traj.rounds();
  cell.cum_regret.resize(T);
  cell.loss_dot_w.resize(T);
  cell.min_coord_t.resize(T);
  cell.max_slack_t.resize(T);
  cell.balance_stat_t.resize(T);
  std::vector<Vec> nbasis;
  for (const auto& v : ctx.basis) nbasis.push_back(v / v.lpNorm<1>());
  Vec g1;
  if (!nbasis.empty()) g1 = regularizer_gradient(ctx.reg, traj.iterates.front());

  double creg = 0.0, mslack = 0.0;
  cell.min_coord = traj.iterates.front().coords.minCoeff();
  for (long t = 0; t < T; ++t) {
    creg += rep.per_round_regret[t];
    mslack = std::max(mslack, traj.certificates[t].slack);
    cell.cum_regret[t] = creg;
    cell.loss_dot_w[t] = kahan_dot(traj.losses[t], traj.iterates[t].coords);
    cell.min_coord_t[t] = traj.iterates[t].coords.minCoeff();
    cell.min_coord = std::min(cell.min_coord, cell.min_coord_t[t]);
    cell.max_slack_t[t] = mslack;
    double bal = 0.0;
    if (!nbasis.empty()) {
      const Vec gt = regularizer_gradient(ctx.reg, traj.iterates[t]);
      for (const auto& v : nbasis) bal = std::max(bal, std::abs((g1 - gt).dot(v)));
    }
    cell.balance_stat_t[t] = bal;
  }
  cell.min_coord = std::min(cell.min_coord, traj.iterates.back().coords.minCoeff());

  if (!ctx.basis.empty()) cell.loss_alpha = loss_balance(traj.losses, ctx.basis);
  return cell;
}

// Scenario-level assertions: the generic certificate-completeness check plus
// the named preset bounds.
std::vector<std::string> scenario_assertions(const Scenario& s,
                                             const ScenarioContext& ctx,
                                             const std::vector<CellResult>& cells) {
  std::vector<std::string> fails;
  const double slack_cap = std::max(s.eps, kCertFloor) * (1 + 1e-9) + 1e-15;
  for (const auto& c : cells) {
    if (s.runner != "exact" && c.max_slack > slack_cap)
      fails.push_back("seed " + std::to_string(c.seed) + ": max slack " +
                      fmt(c.max_slack) + " exceeds eps");
    if (c.cum_regret.size() != static_cast<size_t>(s.T))
      fails.push_back("seed " + std::to_string(c.seed) + ": trace length mismatch");
  }

  const auto require = [&](bool ok, const std::string& what) {
    if (!ok) fails.push_back(what);
  };

  if (s.runner == "adversarial_smooth_stuck") {
    const double ell = std::min(std::sqrt(2 * s.beta * s.eps) / s.eta, 1.0);
    const double want = ell * s.T * s.D / 2.0;
    for (const auto& c : cells)
      require(std::abs(c.final_regret - want) <= 1e-6,
              "regret " + fmt(c.final_regret) + " != lTD/2 = " + fmt(want));
  } else if (s.runner == "adversarial_entropy_stuck") {
    const long tau =
        static_cast<long>(std::ceil(std::log(4 * s.eta / s.eps) / s.eta));
    for (const auto& c : cells) {
      const double frozen_mass = c.min_coord;  // frozen small coordinate
      const double want = 0.9 * (s.T - 2.0 * tau) * (1.0 - frozen_mass);
      require(c.final_regret >= want,
              "regret " + fmt(c.final_regret) + " below stuck prediction " +
                  fmt(want));
    }
  } else if (s.runner == "adversarial_dimension_stuck") {
    const double want = static_cast<double>(s.T) * (1.0 - 1.0 / s.d);
    for (const auto& c : cells)
      require(std::abs(c.final_regret - want) <= 1e-9,
              "regret " + fmt(c.final_regret) + " != T(1-1/d) = " + fmt(want));
  } else if (s.runner == "adversarial_polytope_stuck") {
    double mean = 0.0;
    for (const auto& c : cells) mean += c.final_regret;
    mean /= cells.empty() ? 1 : cells.size();
    const double d = static_cast<double>(ctx.hard->d);
    const double want = 0.25 * s.T * std::sqrt(s.eta * d) / d;
    require(mean >= want, "mean regret " + fmt(mean) +
                              " below 0.25*T*sqrt(eta*d)/d = " + fmt(want));
  } else if (s.runner == "adversarial_double_switch") {
    for (const auto& c : cells)
      require(c.final_regret >= s.T / 2.0,
              "regret " + fmt(c.final_regret) + " below T/2");
  } else if (s.name == "smooth-ub") {
    const double dr = 0.5 * s.beta * (s.hi - s.lo) * (s.hi - s.lo) / 4.0;
    const double bound =
        smooth_regret_bound(s.hi - s.lo, s.beta, s.eps, s.eta, s.T, dr);
    for (const auto& c : cells)
      require(c.final_regret <= bound,
              "regret " + fmt(c.final_regret) + " above smooth bound " + fmt(bound));
  } else if (s.name == "entropy-ub") {
    const double bound = std::log(static_cast<double>(s.d)) / s.eta +
                         8.0 * s.eta * s.T;
    for (const auto& c : cells)
      require(c.final_regret <= bound,
              "regret " + fmt(c.final_regret) + " above entropy bound " + fmt(bound));
  } else if (s.name == "barrier-ub") {
    const Regularizer reg = make_reg(s);
    const double psi = psi_floor(reg.nu(), reg.c1(), s.eta, s.T, s.d);
    for (const auto& c : cells)
      require(c.min_coord >= psi,
              "seed " + std::to_string(c.seed) + ": coordinate " +
                  fmt(c.min_coord) + " below psi floor " + fmt(psi));
  } else if (s.name == "stochastic-ub") {
    const double bound =
        8.0 * std::sqrt(static_cast<double>(s.T) * std::log(static_cast<double>(s.d)));
    long ok = 0;
    for (const auto& c : cells)
      if (c.final_regret <= bound) ++ok;
    require(ok * 20 >= static_cast<long>(cells.size()) * 19,
            "fewer than 19/20 seeds below 8*sqrt(T log d)");
  } else if (s.name == "ftrl") {
    const double bound =
        ftrl_regret_bound(s.eps, s.eta, s.T, std::log(static_cast<double>(s.d)));
    for (const auto& c : cells)
      require(c.final_regret <= bound + 1e-6,
              "regret " + fmt(c.final_regret) + " above FTRL bound " + fmt(bound));
  }
  return fails;
}

}  // namespace

// ---------------------------------------------------------------------------
// outputs

std::string emit_svg(const Scenario& s,
                     const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw std::invalid_argument("emit_svg: no traces");
  const int W = 860, H = 520, ml = 70, mr = 20, mt = 40, mb = 50;
  const long T = static_cast<long>(curves.front().size());
  double ymin = 0.0, ymax = 0.0;
  for (const auto& c : curves)
    for (double y : c) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (ymax == ymin) ymax = ymin + 1.0;

  const auto px = [&](long t) {
    return ml + (W - ml - mr) * (T <= 1 ? 1.0 : static_cast<double>(t) / (T - 1));
  };
  const auto py = [&](double y) {
    return mt + (H - mt - mb) * (1.0 - (y - ymin) / (ymax - ymin));
  };
  const auto coord = [](double v) {
    char b[24];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " "
      << H << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << s.name << "  eta=" << fmt(s.eta)
      << "  eps=" << fmt(s.eps) << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << (H - mb) << "\" x2=\"" << (W - mr)
      << "\" y2=\"" << (H - mb) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << (H - mb) << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"" << (H - mb + 18)
      << "\" font-family=\"sans-serif\" font-size=\"11\">t=1</text>\n";
  out << "<text x=\"" << (W - mr - 40) << "\" y=\"" << (H - mb + 18)
      << "\" font-family=\"sans-serif\" font-size=\"11\">t=" << T << "</text>\n";
  out << "<text x=\"4\" y=\"" << py(ymin)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ymin)
      << "</text>\n";
  out << "<text x=\"4\" y=\"" << (py(ymax) + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ymax)
      << "</text>\n";
  out << "<text x=\"" << (W / 2 - 40) << "\" y=\"" << (H - 10)
      << "\" font-family=\"sans-serif\" font-size=\"12\">cumulative regret vs t"
      << "</text>\n";

  const auto polyline = [&](const std::vector<double>& c, const char* style) {
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (long t = 0; t < T; ++t) {
      if (t) out << ' ';
      out << coord(px(t)) << ',' << coord(py(c[t]));
    }
    out << "\"/>\n";
  };
  for (const auto& c : curves)
    polyline(c, "stroke=\"#4477aa\" stroke-width=\"1\" stroke-opacity=\"0.45\"");
  if (curves.size() > 1) {
    std::vector<double> mean(T, 0.0);
    for (const auto& c : curves)
      for (long t = 0; t < T; ++t) mean[t] += c[t];
    for (long t = 0; t < T; ++t) mean[t] /= static_cast<double>(curves.size());
    polyline(mean, "stroke=\"#222222\" stroke-width=\"2.5\"");
  }
  out << "</svg>\n";
  return out.str();
}

int run_scenario(const Scenario& s, const std::string& out_dir, int jobs,
                 ScenarioResult* result_out) {
  validate(s);

  ScenarioContext ctx{Domain::simplex(2), Regularizer::neg_entropy(), {}, nullptr};
  HardPolytope hard;
  if (s.domain_kind == "simplex") {
    ctx.dom = Domain::simplex(s.d);
  } else if (s.domain_kind == "interval") {
    ctx.dom = Domain::interval(s.lo, s.hi);
  } else if (s.domain_kind == "hard_polytope") {
    hard = build_hard_polytope(s.eps, s.eta);
    hard.event_round_bound = desk_event_round_bound(hard.m, s.eta, s.T);
    ctx.hard = &hard;
    ctx.dom = hard.domain();
    if (hard.d_exceeds_inv_eta)
      std::cerr << "warning: hard polytope d=" << hard.d
                << " exceeds 1/eta; construction still runs\n";
  } else {
    throw std::invalid_argument("unknown domain kind '" + s.domain_kind + "'");
  }
  ctx.reg = make_reg(s);
  if (ctx.dom.kind() != DomainKind::interval)
    ctx.basis = ctx.hard ? ctx.hard->basis : kernel_basis(ctx.dom);

  std::vector<std::uint64_t> seeds = s.seeds;
  if (const char* env = std::getenv("OMDLAB_SEED"))
    seeds.assign(1, std::stoull(env));

  const int n = static_cast<int>(seeds.size());
  std::vector<CellResult> cells(n);
  std::vector<std::string> errors(n);
#ifdef _OPENMP
#pragma omp parallel for num_threads(std::max(1, jobs)) schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      cells[i] = run_cell(s, ctx, seeds[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      throw std::runtime_error("seed " + std::to_string(seeds[i]) + ": " +
                               errors[i]);

  std::vector<std::string> failures = scenario_assertions(s, ctx, cells);

  ScenarioResult res;
  res.cells = cells;
  res.failures = failures;
  if (s.runner == "adversarial_polytope_stuck") {
    long total_tries = 0;
    for (const auto& c : cells) total_tries += c.event_tries;
    res.event_rate = total_tries > 0
                         ? static_cast<double>(n) / static_cast<double>(total_tries)
                         : -1.0;
  }

  // outputs (written once, in seed order, after all cells finished)
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const std::string& leaf) {
    return (fs::path(out_dir) / leaf).string();
  };
  if (s.trace_csv) {
    for (int i = 0; i < n; ++i) {
      std::ofstream f(path(s.name + "_seed" + std::to_string(seeds[i]) +
                           "_trace.csv"),
                      std::ios::binary);
      f << "t,loss_dot_w,cum_regret,min_coord,max_cert_slack_so_far,balance_stat\r\n";
      const auto& c = cells[i];
      for (long t = 0; t < s.T; ++t)
        f << (t + 1) << ',' << fmt(c.loss_dot_w[t]) << ',' << fmt(c.cum_regret[t])
          << ',' << fmt(c.min_coord_t[t]) << ',' << fmt(c.max_slack_t[t]) << ','
          << fmt(c.balance_stat_t[t]) << "\r\n";
    }
  }
  if (s.summary_csv) {
    std::ofstream f(path(s.name + "_summary.csv"), std::ios::binary);
    f << "seed,final_regret,max_cert_slack,min_coord,loss_balance_alpha,"
         "fallback,event_tries\r\n";
    for (int i = 0; i < n; ++i) {
      const auto& c = cells[i];
      f << seeds[i] << ',' << fmt(c.final_regret) << ',' << fmt(c.max_slack)
        << ',' << fmt(c.min_coord) << ',' << fmt(c.loss_alpha) << ','
        << (c.fallback ? 1 : 0) << ',' << c.event_tries << "\r\n";
    }
  }
  if (s.regret_svg) {
    std::vector<std::vector<double>> curves;
    for (const auto& c : cells) curves.push_back(c.cum_regret);
    std::ofstream f(path(s.name + "_regret.svg"), std::ios::binary);
    f << emit_svg(s, curves);
  }

  for (const auto& msg : failures)
    std::cerr << s.name << ": assertion failed: " << msg << "\n";
  if (res.event_rate >= 0)
    std::cout << s.name << ": hardness event acceptance rate " << res.event_rate
              << "\n";
  std::cout << s.name << ": " << n << " seed(s), "
            << (failures.empty() ? "all assertions passed" : "ASSERTIONS FAILED")
            << "\n";
  if (result_out) *result_out = std::move(res);
  return failures.empty() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// presets

std::vector<std::string> list_presets() {
  return {"smooth-lb",     "smooth-ub",  "entropy-lb", "entropy-ub",
          "barrier-ub",    "stochastic-ub", "dimension-lb", "polytope-lb",
          "double-switch", "ftrl"};
}

Scenario preset(const std::string& name) {
  Scenario s;
  s.name = name;
  s.seeds = {1};
  if (name == "smooth-lb") {
    s.runner = "adversarial_smooth_stuck";
    s.domain_kind = "interval";
    s.reg_kind = "euclidean";
    s.beta = 1.0;
    s.eta = 0.2;
    s.eps = 0.005;
    s.T = 1000;
    s.D = 1.0;
    s.lo = 0.0;
    s.hi = 1.0;
  } else if (name == "smooth-ub") {
    s.runner = "honest_tight";
    s.domain_kind = "interval";
    s.reg_kind = "euclidean";
    s.beta = 1.0;
    s.T = 4096;
    s.eta = 1.0 / std::sqrt(4096.0);
    s.eps = 1e-8;
    s.loss_kind = "iid_uniform";
    s.d = 1;
    s.seeds.clear();
    for (std::uint64_t k = 1; k <= 20; ++k) s.seeds.push_back(k);
  } else if (name == "entropy-lb") {
    s.runner = "adversarial_entropy_stuck";
    s.reg_kind = "neg_entropy";
    s.d = 2;
    s.eta = 0.1;
    s.T = 600;
    s.alpha = s.T / 3.0;
    s.eps = 4.0 * s.eta * std::exp(-s.eta * s.T / 3.0);
  } else if (name == "entropy-ub") {
    s.runner = "honest_saturating";
    s.reg_kind = "neg_entropy";
    s.d = 4;
    s.eta = 0.05;
    s.T = 400;
    s.eps = std::max(entropy_robust_epsilon(s.eta, s.T, s.d), kCertFloor);
    s.loss_kind = "switching";
    Vec e1 = Vec::Zero(4), e2 = Vec::Zero(4);
    e1[0] = 1.0;
    e2[1] = 1.0;
    s.phases = {{s.T / 2, e1}, {s.T / 2, e2}};
    s.seeds.clear();
    for (std::uint64_t k = 1; k <= 20; ++k) s.seeds.push_back(k);
  } else if (name == "barrier-ub") {
    s.runner = "honest_saturating";
    s.reg_kind = "log_barrier";
    s.d = 4;
    s.eta = 0.05;
    s.T = 2000;
    s.eps = std::max(barrier_robust_epsilon(Regularizer::log_barrier(), s.eta, s.T, s.d),
                     kCertFloor);
    s.loss_kind = "switching";
    Vec e1 = Vec::Zero(4), e2 = Vec::Zero(4);
    e1[0] = 1.0;
    e2[1] = 1.0;
    s.phases = {{s.T / 2, e1}, {s.T / 2, e2}};
    s.seeds.clear();
    for (std::uint64_t k = 1; k <= 20; ++k) s.seeds.push_back(k);
  } else if (name == "stochastic-ub") {
    s.runner = "honest_saturating";
    s.reg_kind = "neg_entropy";
    s.d = 4;
    s.T = 4096;
    s.eta = std::sqrt(std::log(4.0) / 4096.0);
    s.eps = 1e-12;
    s.loss_kind = "iid_uniform";
    s.seeds.clear();
    for (std::uint64_t k = 1; k <= 20; ++k) s.seeds.push_back(k);
  } else if (name == "dimension-lb") {
    s.runner = "adversarial_dimension_stuck";
    s.reg_kind = "neg_entropy";
    s.d = 4;
    s.eta = 0.1;
    s.eps = 0.01;
    s.T = 1000;
  } else if (name == "polytope-lb") {
    s.runner = "adversarial_polytope_stuck";
    s.domain_kind = "hard_polytope";
    s.reg_kind = "neg_entropy";
    s.eta = 0.1;
    s.eps = std::exp(-1.0);
    s.T = 3000;
    s.seeds.clear();
    for (std::uint64_t k = 1; k <= 20; ++k) s.seeds.push_back(k);
  } else if (name == "double-switch") {
    s.runner = "adversarial_double_switch";
    s.reg_kind = "neg_entropy";
    s.d = 2;
    s.eta = 0.1;
    s.T = 1000;
    s.k_switch = 5.0;
    s.eps = 4.0 * s.eta * std::exp(-s.k_switch / 2.0);
  } else if (name == "ftrl") {
    s.runner = "ftrl";
    s.reg_kind = "neg_entropy";
    s.d = 2;
    s.eta = 0.1;
    s.eps = 1e-4;
    s.T = 1000;
    s.loss_kind = "switching";
    Vec l10(2), l01(2);
    l10 << 1.0, 0.0;
    l01 << 0.0, 1.0;
    s.phases = {{200, l10}, {800, l01}};
    s.seeds.clear();
    for (std::uint64_t k = 1; k <= 20; ++k) s.seeds.push_back(k);
  } else {
    std::string names;
    for (const auto& p : list_presets()) names += (names.empty() ? "" : ", ") + p;
    throw std::invalid_argument("unknown preset '" + name + "'; valid: " + names);
  }
  return s;
}

}  // namespace omdlab
