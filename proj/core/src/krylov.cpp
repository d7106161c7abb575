#include "rdmg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "rdmg/error.hpp"

namespace rdmg
{

double SolveReport::relative_residual() const
{
  if (residual_history.empty() || residual_history.front() == 0.0)
    return 0.0;
  return residual_history.back() / residual_history.front();
}

double convergence_factor(std::span<const double> history, int window)
{
  if (history.size() < 2 || window < 1)
    return 0.0;
  const std::size_t steps = std::min<std::size_t>(static_cast<std::size_t>(window), history.size() - 1);
  const double last = history.back();
  const double first = history[history.size() - 1 - steps];
  if (first <= 0.0)
    return 0.0;
  return std::pow(last / first, 1.0 / static_cast<double>(steps));
}

namespace
{

// Number of eigenvalues of T strictly below x.
std::size_t sturm_count(std::span<const double> d, std::span<const double> e, double x)
{
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i)
  {
    const double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
    q = d[i] - x - (i == 0 ? 0.0 : off / q);
    if (q == 0.0)
      q = -std::numeric_limits<double>::epsilon() * (std::abs(x) + 1.0);
    if (q < 0.0)
      ++count;
  }
  return count;
}

void fill_lanczos(SolveReport &report)
{
  if (report.alphas.empty())
    return;
  if (report.alphas.size() == 1)
  {
    report.lambda_min_est = report.lambda_max_est = 1.0 / report.alphas[0];
  }
  else
  {
    std::tie(report.lambda_min_est, report.lambda_max_est) = lanczos_estimates(report.alphas, report.betas);
  }
  report.kappa_est = report.lambda_max_est / report.lambda_min_est;
}

} // namespace

Vector tridiagonal_eigenvalues(std::span<const double> d, std::span<const double> e)
{
  const std::size_t n = d.size();
  if (n == 0)
    return {};
  if (e.size() + 1 < n)
    fail(ErrorKind::size, "tridiagonal off-diagonal is too short");
  double lo = d[0], hi = d[0];
  for (std::size_t i = 0; i < n; ++i)
  {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  lo -= 1e-14 * scale + std::numeric_limits<double>::min();
  hi += 1e-14 * scale + std::numeric_limits<double>::min();

  Vector out(n);
  for (std::size_t k = 0; k < n; ++k)
  {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)); ++it)
    {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b)
        break;
      if (sturm_count(d, e.first(n - 1), mid) > k)
        b = mid;
      else
        a = mid;
    }
    out[k] = 0.5 * (a + b);
  }
  return out;
}

std::pair<double, double> lanczos_estimates(std::span<const double> alphas, std::span<const double> betas)
{
  const std::size_t n = alphas.size();
  if (n < 2)
    fail(ErrorKind::insufficient_data, "Lanczos estimates need at least two CG steps");
  if (betas.size() + 1 < n)
    fail(ErrorKind::size, "fewer beta than alpha coefficients");
  Vector d(n), e(n - 1);
  for (std::size_t j = 0; j < n; ++j)
  {
    d[j] = 1.0 / alphas[j] + (j > 0 ? betas[j - 1] / alphas[j - 1] : 0.0);
    if (j + 1 < n)
      e[j] = std::sqrt(betas[j]) / alphas[j];
  }
  const Vector ev = tridiagonal_eigenvalues(d, e);
  return {ev.front(), ev.back()};
}

SolveReport pcg(const SparseMatrix &a, const Preconditioner &b, std::span<const double> rhs,
                const SolveOptions &options)
{
  const std::size_t n = a.rows();
  if (a.cols() != n || rhs.size() != n || b.size() != n)
    fail(ErrorKind::size, "operator, preconditioner and right-hand side sizes differ");

  SolveReport report;
  report.solution.assign(n, 0.0);
  Vector r(rhs.begin(), rhs.end());
  Vector z(n), p(n), q(n);

  double rnorm = norm2(r);
  const double r0 = rnorm;
  report.residual_history.push_back(rnorm);
  if (r0 == 0.0)
  {
    report.converged = true;
    return report;
  }

  b.apply(r, z);
  double rz = dot(r, z);
  if (!(rz > 0.0))
    fail(ErrorKind::definiteness, "preconditioner breakdown: r^T B r <= 0");
  report.preconditioned_history.push_back(std::sqrt(rz));
  p = z;

  while (report.iterations < options.max_iter)
  {
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      fail(ErrorKind::definiteness, "operator breakdown: p^T A p <= 0");
    const double alpha = rz / pq;
    axpy(alpha, p, report.solution);
    axpy(-alpha, q, r);
    ++report.iterations;
    report.alphas.push_back(alpha);

    rnorm = norm2(r);
    report.residual_history.push_back(rnorm);
    if (rnorm <= options.tol * r0)
    {
      report.converged = true;
      break;
    }

    b.apply(r, z);
    const double rz_next = dot(r, z);
    if (!(rz_next > 0.0))
      fail(ErrorKind::definiteness, "preconditioner breakdown: r^T B r <= 0");
    report.preconditioned_history.push_back(std::sqrt(rz_next));
    const double beta = rz_next / rz;
    report.betas.push_back(beta);
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i)
      p[i] = z[i] + beta * p[i];
  }

  fill_lanczos(report);
  report.conv_factor = convergence_factor(report.residual_history);
  return report;
}

SolveReport stationary_solve(const SparseMatrix &a, const Preconditioner &b, std::span<const double> rhs,
                             const SolveOptions &options)
{
  const std::size_t n = a.rows();
  if (a.cols() != n || rhs.size() != n || b.size() != n)
    fail(ErrorKind::size, "operator, preconditioner and right-hand side sizes differ");

  SolveReport report;
  report.solution.assign(n, 0.0);
  Vector r(rhs.begin(), rhs.end());
  Vector z(n), ax(n);
  const double r0 = norm2(r);
  report.residual_history.push_back(r0);
  if (r0 == 0.0)
  {
    report.converged = true;
    return report;
  }

  int growth = 0;
  while (report.iterations < options.max_iter)
  {
    b.apply(r, z);
    axpy(1.0, z, report.solution);
    a.multiply(report.solution, ax);
    for (std::size_t i = 0; i < n; ++i)
      r[i] = rhs[i] - ax[i];
    ++report.iterations;
    const double rnorm = norm2(r);
    const double prev = report.residual_history.back();
    report.residual_history.push_back(rnorm);
    if (rnorm <= options.tol * r0)
    {
      report.converged = true;
      break;
    }
    growth = rnorm > prev ? growth + 1 : 0;
    if (growth >= 10)
      fail(ErrorKind::divergence, "residual grew for 10 consecutive iterations");
  }
  report.conv_factor = convergence_factor(report.residual_history);
  return report;
}

std::string history_csv(const SolveReport &report)
{
  std::ostringstream out;
  out << std::setprecision(17);
  const double r0 = report.residual_history.empty() ? 0.0 : report.residual_history.front();
  for (std::size_t k = 0; k < report.residual_history.size(); ++k)
    out << k << ',' << (r0 > 0.0 ? report.residual_history[k] / r0 : 0.0) << '\n';
  return out.str();
}

} // namespace rdmg
