// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "rdmg/coefficients.hpp"
#include "rdmg/error.hpp"
#include "rdmg/krylov.hpp"
#include "rdmg/multilevel.hpp"
#include "rdmg/spectral.hpp"
#include "rdmg/sweep.hpp"
#include "rdmg/theory.hpp"

using namespace rdmg;

namespace
{

using Clock = std::chrono::steady_clock;

struct Outcome
{
  bool passed = false;
  std::string detail;
};

std::string fmt(const char *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string join(const std::vector<int> &v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

bool within(double x, double ref, double rel) { return std::abs(x - ref) <= rel * ref; }

SweepConfig cube_sweep(std::vector<int> levels, PreconditionerKind p)
{
  SweepConfig c;
  c.geometry.geometry = Geometry::cube;
  c.levels = std::move(levels);
  c.preconditioners = {p};
  return c;
}

std::vector<int> iterations(const ResultTable &t)
{
  std::vector<int> it;
  for (const auto &r : t.rows)
    it.push_back(r.iterations);
  return it;
}

// One dense-oracle instance together with its Lanczos comparison.
struct DenseCase
{
  std::string name;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  double lanczos_min = 0.0;
  double lanczos_max = 0.0;
  double lanczos_kappa = 0.0;
};

std::vector<DenseCase> dense_cases;

struct Instance
{
  MeshHierarchy h;
  TransferOps t;
  LevelStack s;
  CoefficientField omega;
  CoefficientField rho;

  Instance(Geometry g, int level, CoefficientField w, CoefficientField r)
      : h(build_problem_hierarchy({g, 0, 1}, level)), t(build_transfers(h)), s(build_level_stack(h, t, w, r)),
        omega(std::move(w)), rho(std::move(r))
  {
  }

  SpectralReport spectrum(PreconditionerKind p, const std::string &name) const
  {
    const auto b = make_preconditioner(p, s, t);
    SpectralReport rep = dense_spectrum(s.finest(), *b);
    const SolveReport cg = solve_problem(h, t, omega, rho, p, Method::cg, {});
    dense_cases.push_back({name, rep.lambda_min(), rep.lambda_max(), rep.kappa, cg.lambda_min_est,
                           cg.lambda_max_est, cg.kappa_est});
    return rep;
  }
};

Outcome gs_baseline()
{
  const ResultTable t = run_sweep(cube_sweep({1, 2, 3}, PreconditionerKind::sgs));
  const auto it = iterations(t);
  const std::vector<double> ref{18, 36, 66};
  bool ok = t.all_converged();
  for (std::size_t i = 0; i < 3; ++i)
    ok = ok && within(it[i], ref[i], 0.3);
  std::string ratios;
  for (std::size_t i = 1; i < 3; ++i)
  {
    const double q = double(it[i]) / it[i - 1];
    ok = ok && q >= 1.6 && q <= 2.4;
    ratios += fmt(" %.2f", q);
  }
  return {ok, "iterations " + join(it) + " (ref 18,36,66), ratios" + ratios};
}

Outcome gs_rho_robust()
{
  SweepConfig c = cube_sweep({3}, PreconditionerKind::sgs);
  c.rho2 = decade_grid();
  const ResultTable t = run_sweep(c);
  const auto it = iterations(t);
  const auto [lo, hi] = std::minmax_element(it.begin(), it.end());
  const double q = double(*hi) / *lo;
  return {t.all_converged() && q <= 1.4, "level 3 over rho_2 grid: " + join(it) + fmt(", max/min %.2f", q)};
}

Outcome bpx_near_optimal()
{
  const ResultTable t = run_sweep(cube_sweep({1, 2, 3, 4}, PreconditionerKind::bpx));
  const auto it = iterations(t);
  const std::vector<double> ref{20, 27, 31, 33};
  bool ok = t.all_converged();
  for (std::size_t i = 0; i < 4; ++i)
    ok = ok && within(it[i], ref[i], 0.3);
  const double q = double(it[3]) / it[2];
  return {ok && q <= 1.25, "iterations " + join(it) + fmt(" (ref 20,27,31,33), l4/l3 %.2f", q)};
}

Outcome mg_optimal()
{
  SweepConfig c = cube_sweep({1, 2, 3, 4}, PreconditionerKind::mg);
  c.rho2 = decade_grid();
  const ResultTable t = run_sweep(c);
  std::map<int, int> worst;
  for (const auto &r : t.rows)
    worst[r.level] = std::max(worst[r.level], r.iterations);
  bool ok = t.all_converged();
  std::vector<int> w;
  for (const auto &[level, n] : worst)
  {
    ok = ok && n <= 18;
    w.push_back(n);
  }
  const int growth = worst[4] - worst[2];
  return {ok && growth <= 4, "max over rho_2 per level " + join(w) + fmt(", l4 - l2 = %d", growth)};
}

Outcome mg_stationary()
{
  SweepConfig c = cube_sweep({2, 3, 4}, PreconditionerKind::mg);
  c.method = Method::stationary;
  const ResultTable t = run_sweep(c);
  double lo = 1.0, hi = 0.0;
  bool ok = t.all_converged();
  std::string s;
  for (const auto &r : t.rows)
  {
    ok = ok && std::abs(r.conv_factor - 0.21) <= 0.10;
    lo = std::min(lo, r.conv_factor);
    hi = std::max(hi, r.conv_factor);
    s += fmt(" %.3f", r.conv_factor);
  }
  return {ok && hi - lo <= 0.05, "factors" + s + fmt(" (ref 0.21 +- 0.10), spread %.3f", hi - lo)};
}

Outcome mg_lambda_max()
{
  double worst = 0.0;
  std::string s;
  for (const auto &[g, level, w] :
       {std::tuple{Geometry::cube, 1, 1.0}, std::tuple{Geometry::cube, 1, 1e-8}, std::tuple{Geometry::square, 3, 1.0},
        std::tuple{Geometry::square, 3, 1e-8}})
  {
    const Instance in(g, level, CoefficientField::omega({w, 1.0}), CoefficientField::rho({1.0, 1.0}));
    const auto rep = in.spectrum(PreconditionerKind::mg, fmt("mg %s l%d omega_1=%g", std::string(to_string(g)).c_str(),
                                                             level, w));
    worst = std::max(worst, rep.lambda_max());
    s += fmt(" %s/l%d/omega_1=%g: %.12f;", std::string(to_string(g)).c_str(), level, w, rep.lambda_max());
  }
  return {worst <= 1.0 + 1e-8, "lambda_max" + s};
}

Outcome effective_condition_c1()
{
  std::vector<double> k0, km;
  bool detect_ok = true;
  std::string s;
  for (double r : {1.0, 1e-2, 1e-4, 1e-6, 1e-8})
  {
    const Instance in(Geometry::square, 3, CoefficientField::omega({r, 1.0}), CoefficientField::rho({r, r}));
    const int m0 = analyze_subdomains(in.h.finest(), in.omega).floating_components;
    const auto rep = in.spectrum(PreconditionerKind::bpx, fmt("bpx square l3 omega=rho=%g", r));
    const int m = detect_isolated(rep);
    detect_ok = detect_ok && m <= m0;
    k0.push_back(rep.kappa);
    km.push_back(effective_condition(rep, m0));
    s += fmt(" r=%g: m0=%d kappa0=%.3g kappa_m0=%.3g detected=%d;", r, m0, rep.kappa, km.back(), m);
  }
  const auto spread = [](const std::vector<double> &v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
  };
  const double sm = spread(km), s0 = spread(k0);
  return {sm < 2.0 && s0 > 1e3 && detect_ok, fmt("kappa_m0 spread %.3f, kappa0 spread %.3g;", sm, s0) + s};
}

Outcome rho_jumps_c2()
{
  bool ok = true;
  std::string s;
  for (const auto &[g, level] : {std::pair{Geometry::cube, 1}, std::pair{Geometry::square, 3}})
  {
    const std::string gn(to_string(g));
    const auto one = CoefficientField::omega({1.0, 1.0});
    const double base = Instance(g, level, one, CoefficientField::rho({1.0, 1.0}))
                            .spectrum(PreconditionerKind::bpx, fmt("bpx %s l%d rho=1", gn.c_str(), level))
                            .kappa;
    s += fmt(" %s l%d: rho=1 %.3f", gn.c_str(), level, base);
    for (const auto &rho : {std::vector<double>{1.0, 1e8}, std::vector<double>{1e8, 1.0}})
    {
      const double k = Instance(g, level, one, CoefficientField::rho(rho))
                           .spectrum(PreconditionerKind::bpx,
                                     fmt("bpx %s l%d rho=(%g,%g)", gn.c_str(), level, rho[0], rho[1]))
                           .kappa;
      ok = ok && k <= 2.0 * base && k >= 0.5 * base;
      s += fmt(", rho=(%g,%g) %.3f", rho[0], rho[1], k);
    }
    s += ";";
  }
  return {ok, "kappa(B_bpx A)" + s};
}

Outcome hard_enclosure()
{
  SweepConfig c;
  c.geometry.geometry = Geometry::square;
  c.levels = {3, 5, 7};
  c.omega1 = {1e-8};
  c.omega2 = {1.0};
  c.rho2 = decade_grid(false);
  c.rho_ratios = {1e-4, 1e4};
  c.aggregation = Aggregation::max_over_rho;
  c.preconditioners = {PreconditionerKind::mg};
  const ResultTable t = run_sweep(c);
  std::map<int, std::pair<int, int>> by_level;
  for (const auto &r : t.rows)
    (r.rho_ratio < 1.0 ? by_level[r.level].first : by_level[r.level].second) = r.iterations;
  std::string s;
  for (const auto &[level, p] : by_level)
    s += fmt(" l%d: %d vs %d;", level, p.first, p.second);
  const auto [lo, hi] = by_level.rbegin()->second;
  const double growth = double(hi) / lo - 1.0;
  return {t.all_converged() && growth >= 0.2,
          "MG-CG max over rho at rho_1/rho_2 = 1e-4 vs 1e4:" + s + fmt(" growth at largest level %.0f%%", 100 * growth)};
}

Outcome galerkin_equivalence()
{
  double worst = 0.0;
  const auto w = CoefficientField::omega({1.0, 1e-3});
  const auto r = CoefficientField::rho({1.0, 1e2});
  for (const auto &[g, top] : {std::pair{Geometry::cube, 3}, std::pair{Geometry::square, 5}})
  {
    const MeshHierarchy h = build_problem_hierarchy({g, 0, 1}, top);
    const TransferOps t = build_transfers(h);
    const LevelStack a = build_level_stack(h, t, w, r, CoarseOperators::galerkin);
    const LevelStack b = build_level_stack(h, t, w, r, CoarseOperators::rediscretized);
    for (int k = 0; k <= top; ++k)
      worst = std::max(worst, relative_frobenius_distance(a.operators[k], b.operators[k]));
  }
  return {worst <= 1e-12, fmt("max relative Frobenius distance %.3g (cube l0-3, square l0-5)", worst)};
}

Outcome theory_suite()
{
  const auto start = Clock::now();
  const auto rows = run_verification();
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  bool ok = secs < 300.0;
  std::string failed;
  for (const auto &r : rows)
    if (!r.passed)
    {
      ok = false;
      failed += " " + r.name + fmt(" (%.3g vs %.3g)", r.measured, r.bound);
    }
  return {ok, fmt("%zu checks in %.0f s", rows.size(), secs) + (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome lanczos_consistency()
{
  bool ok = !dense_cases.empty();
  std::string bad;
  for (const auto &c : dense_cases)
  {
    const bool inside = c.lanczos_min >= c.lambda_min * (1.0 - 1e-8) && c.lanczos_max <= c.lambda_max * (1.0 + 1e-8);
    const bool sharp = c.lanczos_kappa >= 0.5 * c.kappa;
    if (!inside || !sharp)
    {
      ok = false;
      bad += fmt(" [%s: est %.4g..%.4g vs %.4g..%.4g, kappa %.4g vs %.4g]", c.name.c_str(), c.lanczos_min,
                 c.lanczos_max, c.lambda_min, c.lambda_max, c.lanczos_kappa, c.kappa);
    }
  }
  return {ok, fmt("%zu dense instances", dense_cases.size()) + (bad.empty() ? "" : ", outside:" + bad)};
}

} // namespace

int main()
{
  struct Criterion
  {
    int id;
    const char *name;
    double budget; // seconds, 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "GS-CG baseline", 120.0, gs_baseline},
      {2, "GS-CG rho robustness", 0.0, gs_rho_robust},
      {3, "BPX-CG near-optimality", 0.0, bpx_near_optimal},
      {4, "MG-CG optimality", 0.0, mg_optimal},
      {5, "MG stationary factor", 0.0, mg_stationary},
      {6, "lambda_max(B_mg A) <= 1", 60.0, mg_lambda_max},
      {7, "effective condition, case C1", 0.0, effective_condition_c1},
      {8, "rho jumps with constant omega", 0.0, rho_jumps_c2},
      {9, "hard-enclosure degradation", 0.0, hard_enclosure},
      {10, "Galerkin-assembly equivalence", 0.0, galerkin_equivalence},
      {11, "theory suite", 0.0, theory_suite},
      {12, "Lanczos vs dense consistency", 0.0, lanczos_consistency},
  };

  int failures = 0;
  for (const auto &c : criteria)
  {
    const auto start = Clock::now();
    Outcome o;
    try
    {
      o = c.run();
    }
    catch (const Error &e)
    {
      o = {false, std::string("error (") + std::string(to_string(e.kind())) + "): " + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget > 0.0 && secs > c.budget)
    {
      o.passed = false;
      o.detail += fmt(", over the %.0f s budget", c.budget);
    }
    failures += o.passed ? 0 : 1;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
