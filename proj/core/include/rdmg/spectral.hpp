#ifndef RDMG_SPECTRAL_HPP
#define RDMG_SPECTRAL_HPP

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "rdmg/multilevel.hpp"
#include "rdmg/sparse.hpp"

namespace rdmg
{

struct SpectralReport
{
  // Eigenvalues of BA, ascending.
  Vector eigenvalues;
  int m_detected = 0;
  double kappa = 0.0;
  // Largest ratio lambda_{i+1} / lambda_i in the scanned low end; gap_index
  // is i (1-based count of eigenvalues below the gap).
  int gap_index = 0;
  double gap_ratio = 1.0;

  std::size_t size() const { return eigenvalues.size(); }
  double lambda_min() const { return eigenvalues.front(); }
  double lambda_max() const { return eigenvalues.back(); }
};

// Dense matrix of B, column j = B e_j, symmetrised.
Eigen::MatrixXd materialize(const Preconditioner &b);

// Full spectrum of BA via the pencil (A, B^{-1}): with B = L L^T the
// eigenvalues are those of L^T A L.
SpectralReport dense_spectrum(const SparseMatrix &a, const Preconditioner &b, std::size_t n_limit = 4000,
                              double gap_threshold = 10.0);

// lambda_N / lambda_{m+1}
double effective_condition(const SpectralReport &report, int m);

// Scans the smallest 5% (at least the first gap) for the largest ratio
// lambda_{i+1}/lambda_i and returns i when the ratio reaches the threshold.
int detect_isolated(std::span<const double> eigenvalues, double gap_threshold = 10.0);
int detect_isolated(const SpectralReport &report, double gap_threshold = 10.0);

// min v^T K v / v^T M v over {v : C^T v = 0}; K symmetric, M SPD.
double constrained_min_rayleigh(const Eigen::MatrixXd &k, const Eigen::MatrixXd &m, const Eigen::MatrixXd &c);

} // namespace rdmg

#endif // RDMG_SPECTRAL_HPP
