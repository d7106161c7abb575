#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdmg/assembly.hpp"
#include "rdmg/error.hpp"
#include "rdmg/krylov.hpp"
#include "rdmg/multilevel.hpp"
#include "rdmg/spectral.hpp"
#include "rdmg/sweep.hpp"
#include "rdmg/theory.hpp"

namespace
{

struct Common
{
  std::string geometry = "cube";
  int coarse_cells = 0;
  std::uint64_t seed = 1;
  std::string omega = "1,1";
  std::string rho = "1,1";
  std::string precond = "mg";
  std::string mg_smoother = "sgs";
  std::string method = "cg";
  double tol = 1e-12;
  int max_iter = 2000;
  std::string format = "csv";
  std::string out;
};

void add_problem_flags(CLI::App *app, Common &c)
{
  app->add_option("--geometry", c.geometry, "cube or square")->capture_default_str();
  app->add_option("--coarse-cells", c.coarse_cells, "cells per edge of the coarse mesh (0: default)");
  app->add_option("--seed", c.seed, "label seed of the square geometry")->capture_default_str();
  app->add_option("--omega", c.omega, "omega per subdomain, comma separated")->capture_default_str();
  app->add_option("--rho", c.rho, "rho per subdomain, comma separated")->capture_default_str();
  app->add_option("--precond", c.precond, "none, jacobi, sgs, bpx or mg")->capture_default_str();
  app->add_option("--mg-smoother", c.mg_smoother, "V-cycle smoothing step: sgs (forward+backward) or gs")
      ->capture_default_str();
}

void add_solver_flags(CLI::App *app, Common &c)
{
  app->add_option("--method", c.method, "cg or stationary")->capture_default_str();
  app->add_option("--tol", c.tol, "relative residual tolerance")->capture_default_str();
  app->add_option("--max-iter", c.max_iter, "iteration limit")->capture_default_str();
}

rdmg::GeometryOptions geometry_of(const Common &c)
{
  return {rdmg::parse_geometry(c.geometry), c.coarse_cells, c.seed};
}

std::string fmt(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_text(const std::string &path, const std::string &text)
{
  if (path.empty() || path == "-")
  {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    rdmg::fail(rdmg::ErrorKind::io, "cannot write " + path);
  out << text;
}

int run_solve(const Common &c, int level, const std::string &history, const std::string &dump_mesh,
              const std::string &export_matrix)
{
  const auto hierarchy = rdmg::build_problem_hierarchy(geometry_of(c), level);
  const auto transfers = rdmg::build_transfers(hierarchy);
  const auto omega = rdmg::CoefficientField::omega(rdmg::parse_value_list(c.omega));
  const auto rho = rdmg::CoefficientField::rho(rdmg::parse_value_list(c.rho));
  const auto kind = rdmg::parse_preconditioner(c.precond);
  const auto method = rdmg::parse_method(c.method);

  if (!dump_mesh.empty())
  {
    std::ostringstream s;
    rdmg::write_mesh_ascii(hierarchy.finest(), s);
    write_text(dump_mesh, s.str());
  }
  if (!export_matrix.empty())
  {
    std::ostringstream s;
    rdmg::write_matrix_market(rdmg::assemble_operator(hierarchy.finest(), omega, rho), s);
    write_text(export_matrix, s.str());
  }

  const rdmg::SolveReport rep = rdmg::solve_problem(hierarchy, transfers, omega, rho, kind, method, {c.tol, c.max_iter},
                                                     rdmg::parse_vcycle_smoother(c.mg_smoother));
  if (!history.empty())
    write_text(history, rdmg::emit_history(rep));

  rdmg::ResultTable table;
  table.max_iter = c.max_iter;
  table.rows.push_back({level, hierarchy.finest().num_free(), omega.values(), rho.values(), 0.0, kind, method,
                        rep.iterations, rep.converged, rep.conv_factor, rep.lambda_min_est, rep.lambda_max_est,
                        rep.kappa_est});
  write_text(c.out, rdmg::emit_table(table, rdmg::parse_format(c.format)));
  return rep.converged ? 0 : 2;
}

int run_sweep_command(const Common &c, const std::string &config_path, const std::string &levels,
                      const std::string &rho_grid, const std::string &rho1, const std::string &omega1,
                      const std::string &ratios, bool rho_follows, int threads, const std::string &out_dir,
                      bool flags_given)
{
  rdmg::SweepConfig config;
  if (!config_path.empty())
  {
    config = rdmg::load_sweep_config(config_path);
  }
  if (config_path.empty() || flags_given)
  {
    if (config_path.empty())
    {
      config.geometry = geometry_of(c);
      config.method = rdmg::parse_method(c.method);
      config.solve = {c.tol, c.max_iter};
      const auto omega = rdmg::parse_value_list(c.omega);
      config.omega1 = omega1.empty() ? std::vector<double>{omega.front()} : rdmg::parse_value_list(omega1);
      config.omega2 = {omega.size() > 1 ? omega[1] : omega.front()};
      const auto rho = rdmg::parse_value_list(c.rho);
      config.rho1 = rho1.empty() ? std::vector<double>{rho.front()} : rdmg::parse_value_list(rho1);
      config.rho2 = rho_grid.empty() ? std::vector<double>{rho.size() > 1 ? rho[1] : rho.front()}
                                     : rdmg::parse_value_list(rho_grid);
      config.vcycle_smoother = rdmg::parse_vcycle_smoother(c.mg_smoother);
      config.preconditioners.clear();
      std::stringstream ps(c.precond);
      for (std::string p; std::getline(ps, p, ',');)
        config.preconditioners.push_back(rdmg::parse_preconditioner(p));
    }
    if (!levels.empty())
      config.levels = rdmg::parse_level_list(levels);
    if (!ratios.empty())
    {
      config.rho_ratios = rdmg::parse_value_list(ratios);
      config.aggregation = rdmg::Aggregation::max_over_rho;
    }
    if (rho_follows)
      config.rho_follows_omega1 = true;
    if (threads > 0)
      config.threads = threads;
  }

  const rdmg::ResultTable table = rdmg::run_sweep(config);
  write_text(c.out, rdmg::emit_table(table, rdmg::parse_format(c.format)));
  if (!out_dir.empty())
  {
    std::filesystem::create_directories(out_dir);
    const auto path = rdmg::result_path(config, out_dir);
    write_text(path.string(), rdmg::emit_table(table, rdmg::TableFormat::csv));
    std::cerr << "wrote " << path.string() << '\n';
  }
  return table.all_converged() ? 0 : 2;
}

int run_spectrum(const Common &c, int level, std::size_t n_limit, double gap)
{
  const auto hierarchy = rdmg::build_problem_hierarchy(geometry_of(c), level);
  const auto transfers = rdmg::build_transfers(hierarchy);
  const auto omega = rdmg::CoefficientField::omega(rdmg::parse_value_list(c.omega));
  const auto rho = rdmg::CoefficientField::rho(rdmg::parse_value_list(c.rho));
  const auto stack = rdmg::build_level_stack(hierarchy, transfers, omega, rho);
  const auto b = rdmg::make_preconditioner(rdmg::parse_preconditioner(c.precond), stack, transfers,
                                          rdmg::parse_vcycle_smoother(c.mg_smoother));
  const auto report = rdmg::dense_spectrum(stack.finest(), *b, n_limit, gap);
  const auto info = rdmg::analyze_subdomains(hierarchy.finest(), omega);
  const int m0 = std::min<int>(info.floating_components, static_cast<int>(report.size()) - 1);

  std::ostringstream s;
  s << "index,eigenvalue\n";
  s.precision(17);
  for (std::size_t i = 0; i < report.size(); ++i)
    s << i + 1 << ',' << report.eigenvalues[i] << '\n';
  s << "# summary: n=" << report.size() << " kappa=" << fmt(report.kappa) << " m0=" << m0
    << " kappa_m0=" << fmt(rdmg::effective_condition(report, m0)) << " m_detected=" << report.m_detected
    << " gap_ratio=" << fmt(report.gap_ratio) << '\n';
  write_text(c.out, s.str());
  return 0;
}

int run_verify(const rdmg::VerificationOptions &options, const std::string &out)
{
  const auto rows = rdmg::run_verification(options);
  std::ostringstream s;
  s << "| check | measured | bound | result | detail |\n|---|---|---|---|---|\n";
  bool ok = true;
  for (const auto &r : rows)
  {
    s << "| " << r.name << " | " << fmt(r.measured) << " | " << fmt(r.bound) << " | " << (r.passed ? "pass" : "FAIL")
      << " | " << r.detail << " |\n";
    ok = ok && r.passed;
  }
  write_text(out, s.str());
  return ok ? 0 : 3;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Multilevel preconditioners for reaction-diffusion problems with jump coefficients"};
  app.require_subcommand(1);
  Common c;

  auto *solve = app.add_subcommand("solve", "solve one problem and print a result row");
  int solve_level = 2;
  std::string history, dump_mesh, export_matrix;
  add_problem_flags(solve, c);
  add_solver_flags(solve, c);
  solve->add_option("--levels", solve_level, "finest refinement level")->capture_default_str();
  solve->add_option("--history", history, "write the residual history CSV here");
  solve->add_option("--dump-mesh", dump_mesh, "write the finest mesh here");
  solve->add_option("--export-matrix", export_matrix, "write A in Matrix Market format here");
  solve->add_option("--format", c.format, "csv or markdown")->capture_default_str();
  solve->add_option("--out", c.out, "output file (default stdout)");

  auto *sweep = app.add_subcommand("sweep", "run a coefficient sweep");
  std::string config_path, levels, rho_grid, rho1, omega1, ratios, out_dir;
  bool rho_follows = false;
  int threads = 0;
  add_problem_flags(sweep, c);
  add_solver_flags(sweep, c);
  sweep->add_option("--config", config_path, "key = value sweep file");
  sweep->add_option("--levels", levels, "levels, e.g. 1-4 or 1,3");
  sweep->add_option("--rho-grid", rho_grid, "values of rho_2 (\"decades\" for the full grid)");
  sweep->add_option("--rho1", rho1, "values of rho_1");
  sweep->add_option("--omega1", omega1, "values of omega_1");
  sweep->add_option("--rho-ratio", ratios, "rho_1/rho_2 ratios; takes the maximum over rho_2");
  sweep->add_flag("--rho-follows-omega1", rho_follows, "set rho = omega_1 everywhere");
  sweep->add_option("--threads", threads, "worker threads (0: all cores)");
  sweep->add_option("--format", c.format, "csv or markdown")->capture_default_str();
  sweep->add_option("--out", c.out, "output file (default stdout)");
  sweep->add_option("--out-dir", out_dir, "also store CSV named by the config hash here");

  auto *spectrum = app.add_subcommand("spectrum", "dense spectrum of the preconditioned operator");
  int spec_level = 1;
  std::size_t n_limit = 4000;
  double gap = 10.0;
  add_problem_flags(spectrum, c);
  spectrum->add_option("--levels", spec_level, "finest refinement level")->capture_default_str();
  spectrum->add_option("--n-limit", n_limit, "largest N for the dense solve")->capture_default_str();
  spectrum->add_option("--gap", gap, "ratio that marks isolated eigenvalues")->capture_default_str();
  spectrum->add_option("--out", c.out, "output file (default stdout)");

  auto *verify = app.add_subcommand("verify", "measure the interpolation and decomposition estimates");
  rdmg::VerificationOptions vopts;
  verify->add_option("--levels", vopts.cube_levels, "finest level of the cube hierarchy")->capture_default_str();
  verify->add_option("--samples", vopts.samples, "random draws per stability sup")->capture_default_str();
  verify->add_option("--seed", vopts.seed, "random seed")->capture_default_str();
  verify->add_option("--out", c.out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*solve)
      return run_solve(c, solve_level, history, dump_mesh, export_matrix);
    if (*sweep)
    {
      const bool flags_given = !levels.empty() || !ratios.empty() || rho_follows || threads > 0;
      return run_sweep_command(c, config_path, levels, rho_grid, rho1, omega1, ratios, rho_follows, threads, out_dir,
                               flags_given);
    }
    if (*spectrum)
      return run_spectrum(c, spec_level, n_limit, gap);
    if (*verify)
      return run_verify(vopts, c.out);
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
