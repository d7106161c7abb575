#include "rdmg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rdmg/error.hpp"

namespace rdmg
{

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::int32_t> col_idx, std::vector<double> values)
  : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
    values_(std::move(values))
{
  if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() || row_ptr_.back() != values_.size())
    fail(ErrorKind::structure, "inconsistent CSR arrays");
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::span<const Triplet> triplets)
{
  // Counting sort by row keeps input order within each row.
  std::vector<std::size_t> count(rows + 1, 0);
  for (const Triplet &t : triplets)
  {
    if (t.row < 0 || static_cast<std::size_t>(t.row) >= rows || t.col < 0 || static_cast<std::size_t>(t.col) >= cols)
      fail(ErrorKind::structure, "triplet index out of range");
    ++count[static_cast<std::size_t>(t.row) + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::size_t> order(triplets.size());
  {
    std::vector<std::size_t> cursor(count.begin(), count.end() - 1);
    for (std::size_t i = 0; i < triplets.size(); ++i)
      order[cursor[triplets[i].row]++] = i;
  }

  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::int32_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  std::vector<std::pair<std::int32_t, std::size_t>> row;
  for (std::size_t r = 0; r < rows; ++r)
  {
    row.clear();
    for (std::size_t k = count[r]; k < count[r + 1]; ++k)
      row.emplace_back(triplets[order[k]].col, order[k]);
    std::stable_sort(row.begin(), row.end(), [](auto &a, auto &b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size();)
    {
      double sum = 0.0;
      std::size_t j = k;
      for (; j < row.size() && row[j].first == row[k].first; ++j)
        sum += triplets[row[j].second].value;
      col_idx.push_back(row[k].first);
      values.push_back(sum);
      k = j;
    }
    row_ptr[r + 1] = values.size();
  }
  return {rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values)};
}

SparseMatrix SparseMatrix::identity(std::size_t n)
{
  std::vector<std::size_t> row_ptr(n + 1);
  std::iota(row_ptr.begin(), row_ptr.end(), std::size_t{0});
  std::vector<std::int32_t> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  return {n, n, std::move(row_ptr), std::move(cols), Vector(n, 1.0)};
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
  if (x.size() != cols_ || y.size() != rows_)
    fail(ErrorKind::structure, "vector length does not match the matrix");
  for (std::size_t i = 0; i < rows_; ++i)
  {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const
{
  if (x.size() != rows_ || y.size() != cols_)
    fail(ErrorKind::structure, "vector length does not match the matrix");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
  {
    const double xi = x[i];
    if (xi == 0.0)
      continue;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      y[col_idx_[k]] += values_[k] * xi;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const
{
  Vector y(rows_);
  multiply(x, y);
  return y;
}

double SparseMatrix::at(std::size_t i, std::size_t j) const
{
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(j));
  return (it != last && *it == static_cast<std::int32_t>(j)) ? values_[static_cast<std::size_t>(it - col_idx_.begin())] : 0.0;
}

Vector SparseMatrix::diagonal() const
{
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = at(i, i);
  return d;
}

SparseMatrix SparseMatrix::transpose() const
{
  std::vector<std::size_t> row_ptr(cols_ + 1, 0);
  for (auto c : col_idx_)
    ++row_ptr[static_cast<std::size_t>(c) + 1];
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  std::vector<std::int32_t> cols(nnz());
  Vector vals(nnz());
  std::vector<std::size_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    {
      const std::size_t dst = cursor[col_idx_[k]]++;
      cols[dst] = static_cast<std::int32_t>(i);
      vals[dst] = values_[k];
    }
  return {cols_, rows_, std::move(row_ptr), std::move(cols), std::move(vals)};
}

Eigen::MatrixXd SparseMatrix::to_dense() const
{
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      dense(static_cast<Eigen::Index>(i), col_idx_[k]) = values_[k];
  return dense;
}

SparseMatrix multiply(const SparseMatrix &a, const SparseMatrix &b)
{
  if (a.cols() != b.rows())
    fail(ErrorKind::structure, "incompatible dimensions in sparse product");
  std::vector<std::size_t> row_ptr(a.rows() + 1, 0);
  std::vector<std::int32_t> cols;
  Vector vals;
  // Dense accumulator with a marker per output column.
  Vector acc(b.cols(), 0.0);
  std::vector<std::int64_t> mark(b.cols(), -1);
  std::vector<std::int32_t> touched;
  for (std::size_t i = 0; i < a.rows(); ++i)
  {
    touched.clear();
    for (std::size_t ka = a.row_ptr()[i]; ka < a.row_ptr()[i + 1]; ++ka)
    {
      const auto j = static_cast<std::size_t>(a.col_idx()[ka]);
      const double av = a.values()[ka];
      for (std::size_t kb = b.row_ptr()[j]; kb < b.row_ptr()[j + 1]; ++kb)
      {
        const auto c = b.col_idx()[kb];
        if (mark[c] != static_cast<std::int64_t>(i))
        {
          mark[c] = static_cast<std::int64_t>(i);
          acc[c] = 0.0;
          touched.push_back(c);
        }
        acc[c] += av * b.values()[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto c : touched)
    {
      cols.push_back(c);
      vals.push_back(acc[c]);
    }
    row_ptr[i + 1] = vals.size();
  }
  return {a.rows(), b.cols(), std::move(row_ptr), std::move(cols), std::move(vals)};
}

double max_asymmetry(const SparseMatrix &a)
{
  if (a.rows() != a.cols())
    return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      worst = std::max(worst, std::abs(a.values()[k] - a.at(static_cast<std::size_t>(a.col_idx()[k]), i)));
  return worst;
}

double relative_frobenius_distance(const SparseMatrix &a, const SparseMatrix &b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::structure, "matrices differ in shape");
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
  {
    std::size_t ka = a.row_ptr()[i], kb = b.row_ptr()[i];
    const std::size_t ea = a.row_ptr()[i + 1], eb = b.row_ptr()[i + 1];
    while (ka < ea || kb < eb)
    {
      const auto ca = ka < ea ? a.col_idx()[ka] : INT32_MAX;
      const auto cb = kb < eb ? b.col_idx()[kb] : INT32_MAX;
      double va = 0.0, vb = 0.0;
      if (ca <= cb)
        va = a.values()[ka++];
      if (cb <= ca)
        vb = b.values()[kb++];
      diff += (va - vb) * (va - vb);
      ref += vb * vb;
    }
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

void write_matrix_market(const SparseMatrix &a, std::ostream &out)
{
  std::size_t lower = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      lower += static_cast<std::size_t>(a.col_idx()[k]) <= i;
  const auto old_precision = out.precision(17);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.rows() << ' ' << a.cols() << ' ' << lower << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      if (static_cast<std::size_t>(a.col_idx()[k]) <= i)
        out << i + 1 << ' ' << a.col_idx()[k] + 1 << ' ' << a.values()[k] << '\n';
  out.precision(old_precision);
}

double dot(std::span<const double> x, std::span<const double> y)
{
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += alpha * x[i];
}

} // namespace rdmg
