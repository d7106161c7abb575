#ifndef RDMG_SPARSE_HPP
#define RDMG_SPARSE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rdmg
{

using Vector = std::vector<double>;

struct Triplet
{
  std::int32_t row;
  std::int32_t col;
  double value;
};

//
// Compressed-sparse-row matrix with sorted, duplicate-free column indices.
//
class SparseMatrix
{
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::int32_t> col_idx, std::vector<double> values);

  // Duplicates are summed in input order, so equal inputs give bitwise equal
  // matrices.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::span<const Triplet> triplets);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t> &row_ptr() const { return row_ptr_; }
  const std::vector<std::int32_t> &col_idx() const { return col_idx_; }
  const std::vector<double> &values() const { return values_; }
  std::vector<double> &values() { return values_; }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  // y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  double at(std::size_t i, std::size_t j) const;
  Vector diagonal() const;
  SparseMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::int32_t> col_idx_;
  std::vector<double> values_;
};

SparseMatrix multiply(const SparseMatrix &a, const SparseMatrix &b);

// max_ij |A_ij - A_ji|
double max_asymmetry(const SparseMatrix &a);

// ||A - B||_F / ||B||_F, structures may differ.
double relative_frobenius_distance(const SparseMatrix &a, const SparseMatrix &b);

// Matrix Market coordinate format, lower triangle, "real symmetric".
void write_matrix_market(const SparseMatrix &a, std::ostream &out);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

} // namespace rdmg

#endif // RDMG_SPARSE_HPP
