#ifndef RDMG_SWEEP_HPP
#define RDMG_SWEEP_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rdmg/coefficients.hpp"
#include "rdmg/krylov.hpp"
#include "rdmg/mesh.hpp"
#include "rdmg/multilevel.hpp"

namespace rdmg
{

enum class Geometry
{
  cube,   // unit cube with two touching cubic inclusions
  square, // unit square with randomly labelled coarse triangles
};

std::string_view to_string(Geometry g);
Geometry parse_geometry(std::string_view name);

struct GeometryOptions
{
  Geometry geometry = Geometry::cube;
  // Cells per edge of the coarse mesh; 0 picks 4 (cube) or 6 (square).
  int coarse_cells = 0;
  // Label assignment of the square.
  std::uint64_t seed = 1;
};

Mesh build_coarse_mesh(const GeometryOptions &options);
MeshHierarchy build_problem_hierarchy(const GeometryOptions &options, int finest_level);

// First `finest_level` + 1 levels of `h`.
MeshHierarchy truncate_hierarchy(const MeshHierarchy &h, int finest_level);

enum class Method
{
  cg,         // preconditioned CG
  stationary, // x <- x + B(b - A x)
};

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

// Solves a(u, v) = (1, v) on the finest level of the hierarchy.
SolveReport solve_problem(const MeshHierarchy &hierarchy, const TransferOps &transfers, const CoefficientField &omega,
                          const CoefficientField &rho, PreconditionerKind precond, Method method,
                          const SolveOptions &options, VcycleSmoother smoother = VcycleSmoother::symmetric);

enum class Aggregation
{
  single,
  // Every cell is the maximum over rho_2 in the grid with rho_1 = ratio * rho_2.
  max_over_rho,
};

struct SweepConfig
{
  GeometryOptions geometry;
  std::vector<int> levels{1};
  std::vector<double> omega1{1.0};
  std::vector<double> omega2{1.0};
  std::vector<double> rho1{1.0};
  std::vector<double> rho2{1.0};
  // rho_1 / rho_2 values for max_over_rho.
  std::vector<double> rho_ratios{1.0};
  // rho = omega_1 on the whole domain, overriding rho1 / rho2.
  bool rho_follows_omega1 = false;
  std::vector<PreconditionerKind> preconditioners{PreconditionerKind::mg};
  VcycleSmoother vcycle_smoother = VcycleSmoother::symmetric;
  Method method = Method::cg;
  SolveOptions solve;
  Aggregation aggregation = Aggregation::single;
  int threads = 0;

  // Canonical one-line text, used for hashing.
  std::string canonical() const;
};

// {0, 1e-8, 1e-6, ..., 1e8}
std::vector<double> decade_grid(bool with_zero = true);

struct ResultRow
{
  int level = 0;
  std::size_t n = 0;
  std::vector<double> omega;
  std::vector<double> rho;
  // rho_1 / rho_2 of a max_over_rho cell, 0 otherwise.
  double rho_ratio = 0.0;
  PreconditionerKind precond = PreconditionerKind::mg;
  Method method = Method::cg;
  int iterations = 0;
  bool converged = false;
  double conv_factor = 0.0;
  double lambda_min_est = 0.0;
  double lambda_max_est = 0.0;
  double kappa_est = 0.0;

  bool operator==(const ResultRow &) const = default;
};

struct ResultTable
{
  std::vector<ResultRow> rows;
  int max_iter = 0;

  bool all_converged() const;
  bool operator==(const ResultTable &) const = default;
};

ResultTable run_sweep(const SweepConfig &config);

enum class TableFormat
{
  markdown,
  csv,
};

TableFormat parse_format(std::string_view name);

std::string emit_table(const ResultTable &table, TableFormat format);
ResultTable parse_csv(std::string_view text);

// Two-column CSV of the relative residuals.
std::string emit_history(const SolveReport &report);

// <dir>/sweep-<16 hex digits of a hash of canonical()>.csv
std::filesystem::path result_path(const SweepConfig &config, const std::filesystem::path &dir);

// key = value file: geometry, coarse_cells, seed, levels, omega1, omega2,
// rho1, rho2, rho_ratios, rho_follows_omega1, precond, method, tol,
// max_iter, aggregation, threads. Lists are comma separated; "decades"
// expands to the decade grid.
SweepConfig parse_sweep_config(std::istream &in);
SweepConfig load_sweep_config(const std::filesystem::path &path);

// "1-4" or "1,2,3"
std::vector<int> parse_level_list(std::string_view text);
// "0,1e-8,1" or "decades" / "decades+" (without zero)
std::vector<double> parse_value_list(std::string_view text);

} // namespace rdmg

#endif // RDMG_SWEEP_HPP
