#include "rdmg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "rdmg/error.hpp"

namespace rdmg
{

Eigen::MatrixXd materialize(const Preconditioner &b)
{
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd dense(n, n);
  Vector e(b.size(), 0.0), col(b.size());
  for (Eigen::Index j = 0; j < n; ++j)
  {
    e[static_cast<std::size_t>(j)] = 1.0;
    b.apply(e, col);
    e[static_cast<std::size_t>(j)] = 0.0;
    dense.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
  }
  return 0.5 * (dense + dense.transpose());
}

namespace
{

void find_gap(const Vector &ev, int &index, double &ratio)
{
  index = 0;
  ratio = 1.0;
  if (ev.size() < 2)
    return;
  const std::size_t scan = std::max<std::size_t>(1, ev.size() / 20);
  for (std::size_t i = 0; i < scan && i + 1 < ev.size(); ++i)
  {
    const double r = ev[i + 1] / ev[i];
    if (r > ratio)
    {
      ratio = r;
      index = static_cast<int>(i + 1);
    }
  }
}

} // namespace

SpectralReport dense_spectrum(const SparseMatrix &a, const Preconditioner &b, std::size_t n_limit,
                              double gap_threshold)
{
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n)
    fail(ErrorKind::size, "operator and preconditioner sizes differ");
  if (n > n_limit)
    fail(ErrorKind::size, "N = " + std::to_string(n) + " exceeds the dense limit " + std::to_string(n_limit) +
                              "; use the Lanczos estimates from pcg instead");
  if (n == 0)
    fail(ErrorKind::size, "empty operator");

  const Eigen::MatrixXd bd = materialize(b);
  Eigen::LLT<Eigen::MatrixXd> llt(bd);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::definiteness, "preconditioner is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd ad = a.to_dense();
  Eigen::MatrixXd t = l.transpose() * (ad * l);
  t = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::definiteness, "dense eigensolver did not converge");

  SpectralReport report;
  report.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  if (!(report.eigenvalues.front() > 0.0))
    fail(ErrorKind::definiteness, "BA has a non-positive eigenvalue");
  report.kappa = report.eigenvalues.back() / report.eigenvalues.front();
  find_gap(report.eigenvalues, report.gap_index, report.gap_ratio);
  report.m_detected = report.gap_ratio >= gap_threshold ? report.gap_index : 0;
  return report;
}

double effective_condition(const SpectralReport &report, int m)
{
  if (m < 0 || static_cast<std::size_t>(m) >= report.eigenvalues.size())
    fail(ErrorKind::index, "m = " + std::to_string(m) + " outside 0.." +
                               std::to_string(static_cast<long>(report.eigenvalues.size()) - 1));
  return report.eigenvalues.back() / report.eigenvalues[static_cast<std::size_t>(m)];
}

int detect_isolated(std::span<const double> eigenvalues, double gap_threshold)
{
  int index = 0;
  double ratio = 1.0;
  find_gap(Vector(eigenvalues.begin(), eigenvalues.end()), index, ratio);
  return ratio >= gap_threshold ? index : 0;
}

int detect_isolated(const SpectralReport &report, double gap_threshold)
{
  return detect_isolated(report.eigenvalues, gap_threshold);
}

double constrained_min_rayleigh(const Eigen::MatrixXd &k, const Eigen::MatrixXd &m, const Eigen::MatrixXd &c)
{
  const Eigen::Index n = k.rows();
  if (k.cols() != n || m.rows() != n || m.cols() != n || (c.cols() > 0 && c.rows() != n))
    fail(ErrorKind::size, "Rayleigh quotient operands differ in size");
  Eigen::MatrixXd z;
  if (c.cols() == 0)
  {
    z = Eigen::MatrixXd::Identity(n, n);
  }
  else
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(c);
    const Eigen::Index rank = qr.rank();
    const Eigen::MatrixXd q = qr.householderQ();
    z = q.rightCols(n - rank);
  }
  const Eigen::MatrixXd kz = z.transpose() * k * z;
  const Eigen::MatrixXd mz = z.transpose() * m * z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (kz + kz.transpose()),
                                                                   0.5 * (mz + mz.transpose()),
                                                                   Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::definiteness, "constrained eigenproblem failed");
  return solver.eigenvalues()(0);
}

} // namespace rdmg
