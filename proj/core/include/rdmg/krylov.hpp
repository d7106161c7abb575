#ifndef RDMG_KRYLOV_HPP
#define RDMG_KRYLOV_HPP

#include <span>
#include <string_view>
#include <utility>

#include "rdmg/multilevel.hpp"
#include "rdmg/sparse.hpp"

namespace rdmg
{

struct SolveOptions
{
  double tol = 1e-12;
  int max_iter = 2000;
};

//
// Outcome of an iterative solve started from x = 0.
//
// residual_history[k] is ||b - A x_k||_2, with entry 0 the initial residual,
// so a run of n iterations stores n + 1 values. iterations counts
// applications of A to search directions.
//
struct SolveReport
{
  int iterations = 0;
  bool converged = false;
  Vector residual_history;
  // sqrt(r_k^T B r_k); empty for stationary runs.
  Vector preconditioned_history;
  Vector alphas;
  Vector betas;
  double lambda_min_est = 0.0;
  double lambda_max_est = 0.0;
  double kappa_est = 0.0;
  double conv_factor = 0.0;
  Vector solution;

  double relative_residual() const;
};

// Preconditioned CG. Stops once ||r_k||_2 <= tol ||r_0||_2.
SolveReport pcg(const SparseMatrix &a, const Preconditioner &b, std::span<const double> rhs,
                const SolveOptions &options = {});

// x <- x + B (rhs - A x) from x = 0. Ten consecutive residual increases
// raise a divergence error.
SolveReport stationary_solve(const SparseMatrix &a, const Preconditioner &b, std::span<const double> rhs,
                             const SolveOptions &options = {});

// Geometric mean of ||r_k|| / ||r_{k-1}|| over the last `window` steps.
double convergence_factor(std::span<const double> residual_history, int window = 5);

// Extremal eigenvalues of the Lanczos matrix built from CG coefficients
// (needs at least two steps).
std::pair<double, double> lanczos_estimates(std::span<const double> alphas, std::span<const double> betas);

// All eigenvalues of the symmetric tridiagonal matrix with the given diagonal
// and off-diagonal, ascending, by Sturm bisection.
Vector tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> off);

// Two-column CSV without header: iteration, ||r_k|| / ||r_0||.
std::string history_csv(const SolveReport &report);

} // namespace rdmg

#endif // RDMG_KRYLOV_HPP
