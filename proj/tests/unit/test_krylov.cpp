#include <doctest.h>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "rdmg/error.hpp"
#include "rdmg/krylov.hpp"

using namespace rdmg;

namespace
{

SparseMatrix diagonal(const Vector &d)
{
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i)
    t.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(i), d[i]});
  return SparseMatrix::from_triplets(d.size(), d.size(), t);
}

SparseMatrix laplace_1d(std::size_t n)
{
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
  {
    const auto k = static_cast<std::int32_t>(i);
    t.push_back({k, k, 2.0});
    if (i + 1 < n)
    {
      t.push_back({k, k + 1, -1.0});
      t.push_back({k + 1, k, -1.0});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

} // namespace

TEST_CASE("tridiagonal eigenvalues of the 1D Laplacian")
{
  const Vector d(5, 2.0), e(4, -1.0);
  const Vector ev = tridiagonal_eigenvalues(d, e);
  REQUIRE(ev.size() == 5);
  for (int k = 1; k <= 5; ++k)
    CHECK(ev[k - 1] == doctest::Approx(2.0 - 2.0 * std::cos(k * std::numbers::pi / 6.0)).epsilon(1e-13));
}

TEST_CASE("cg on diag(1..10) recovers the extreme eigenvalues")
{
  Vector d;
  for (int i = 1; i <= 10; ++i)
    d.push_back(i);
  const SparseMatrix a = diagonal(d);
  const auto b = make_preconditioner(PreconditionerKind::identity, a);
  const SolveReport r = pcg(a, *b, Vector(10, 1.0));
  CHECK(r.converged);
  CHECK(r.iterations <= 10);
  CHECK(r.residual_history.size() == static_cast<std::size_t>(r.iterations) + 1);
  CHECK(r.lambda_min_est == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.lambda_max_est == doctest::Approx(10.0).epsilon(1e-8));
  CHECK(r.kappa_est == doctest::Approx(10.0).epsilon(1e-8));
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(r.solution[i] == doctest::Approx(1.0 / d[i]));
}

TEST_CASE("exact preconditioner converges in one step")
{
  const SparseMatrix a = laplace_1d(20);
  const auto b = make_exact_inverse(a);
  const SolveReport r = pcg(a, *b, Vector(20, 1.0));
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.lambda_min_est == doctest::Approx(1.0));
  CHECK(r.lambda_max_est == doctest::Approx(1.0));
  CHECK(history_csv(r) == "0,1\n1," + [&] {
          std::ostringstream s;
          s << std::setprecision(17) << r.residual_history[1] / r.residual_history[0];
          return s.str();
        }() + "\n");
}

TEST_CASE("estimates stay inside the spectrum")
{
  const SparseMatrix a = laplace_1d(50);
  const auto b = make_preconditioner(PreconditionerKind::jacobi, a);
  SolveOptions o;
  o.max_iter = 8;
  const SolveReport r = pcg(a, *b, Vector(50, 1.0), o);
  CHECK(!r.converged);
  CHECK(r.iterations == 8);
  const double lo = 1.0 - std::cos(std::numbers::pi / 51.0);
  const double hi = 1.0 + std::cos(std::numbers::pi / 51.0);
  CHECK(r.lambda_min_est >= lo - 1e-12);
  CHECK(r.lambda_max_est <= hi + 1e-12);
}

TEST_CASE("zero right-hand side")
{
  const SparseMatrix a = laplace_1d(4);
  const auto b = make_preconditioner(PreconditionerKind::identity, a);
  const SolveReport r = pcg(a, *b, Vector(4, 0.0));
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.solution == Vector(4, 0.0));
}

TEST_CASE("stationary iteration")
{
  const SparseMatrix a = diagonal({1.0, 1.5});
  const auto b = make_preconditioner(PreconditionerKind::identity, a);
  const SolveReport r = stationary_solve(a, *b, Vector{1.0, 1.0});
  CHECK(r.converged);
  // Error components decay by 0 and 0.5 per step.
  CHECK(r.conv_factor == doctest::Approx(0.5).epsilon(1e-6));

  const SparseMatrix big = diagonal({1.0, 3.0});
  try
  {
    stationary_solve(big, *make_preconditioner(PreconditionerKind::identity, big), Vector{1.0, 1.0});
    FAIL("divergent iteration not reported");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::divergence);
  }
}

TEST_CASE("convergence factor")
{
  Vector h;
  for (int k = 0; k <= 12; ++k)
    h.push_back(std::pow(0.3, k));
  CHECK(convergence_factor(h) == doctest::Approx(0.3));
  CHECK(convergence_factor(h, 2) == doctest::Approx(0.3));
}

TEST_CASE("breakdown and input errors")
{
  const SparseMatrix a = diagonal({1.0, -1.0});
  const auto b = make_preconditioner(PreconditionerKind::identity, a);
  try
  {
    pcg(a, *b, Vector{0.0, 1.0});
    FAIL("indefinite operator accepted");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::definiteness);
  }
  CHECK_THROWS_AS(pcg(a, *b, Vector{1.0}), Error);
  try
  {
    lanczos_estimates(Vector{1.0}, Vector{});
    FAIL("one step accepted");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
}
