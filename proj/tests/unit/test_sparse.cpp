#include <doctest.h>

#include <sstream>

#include "rdmg/error.hpp"
#include "rdmg/sparse.hpp"

using namespace rdmg;

namespace
{

SparseMatrix small()
{
  // [[4, -1, 0], [-1, 4, -2], [0, -2, 5]]
  const std::vector<Triplet> t{{0, 0, 3.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 4.0}, {1, 2, -2.0},
                               {2, 1, -2.0}, {2, 2, 5.0},  {0, 0, 1.0}};
  return SparseMatrix::from_triplets(3, 3, t);
}

} // namespace

TEST_CASE("triplets are summed and sorted")
{
  const SparseMatrix a = small();
  CHECK(a.nnz() == 7);
  CHECK(a.at(0, 0) == 4.0);
  CHECK(a.at(0, 2) == 0.0);
  CHECK(a.diagonal() == Vector{4.0, 4.0, 5.0});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = a.row_ptr()[i] + 1; k < a.row_ptr()[i + 1]; ++k)
      CHECK(a.col_idx()[k - 1] < a.col_idx()[k]);
  CHECK(max_asymmetry(a) == 0.0);
}

TEST_CASE("products")
{
  const SparseMatrix a = small();
  const Vector x{1.0, 2.0, 3.0};
  CHECK(a * x == Vector{2.0, 1.0, 11.0});
  Vector y(3);
  a.multiply_transpose(x, y);
  CHECK(y == Vector{2.0, 1.0, 11.0});

  const std::vector<Triplet> pt{{0, 0, 1.0}, {1, 0, 0.5}, {1, 1, 0.5}, {2, 1, 1.0}};
  const SparseMatrix p = SparseMatrix::from_triplets(3, 2, pt);
  const Eigen::MatrixXd expect = p.to_dense().transpose() * a.to_dense() * p.to_dense();
  const SparseMatrix c = multiply(p.transpose(), multiply(a, p));
  CHECK((c.to_dense() - expect).norm() < 1e-14);
  CHECK(p.transpose().rows() == 2);
  CHECK(SparseMatrix::identity(3).to_dense() == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("vector helpers")
{
  const Vector x{3.0, 4.0};
  Vector y{1.0, 1.0};
  CHECK(dot(x, y) == 7.0);
  CHECK(norm2(x) == 5.0);
  axpy(2.0, x, y);
  CHECK(y == Vector{7.0, 9.0});
}

TEST_CASE("frobenius distance with different structure")
{
  const SparseMatrix a = small();
  const std::vector<Triplet> t{{0, 0, 4.0}, {1, 1, 4.0}, {2, 2, 5.0}};
  const SparseMatrix d = SparseMatrix::from_triplets(3, 3, t);
  CHECK(relative_frobenius_distance(a, a) == 0.0);
  CHECK(relative_frobenius_distance(d, a) == doctest::Approx(std::sqrt(10.0 / 67.0)));
}

TEST_CASE("asymmetry and size errors")
{
  const std::vector<Triplet> t{{0, 1, 1.0}};
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, t);
  CHECK(max_asymmetry(a) == 1.0);
  const std::vector<Triplet> bad{{2, 0, 1.0}};
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, bad), Error);
  const Vector x{1.0};
  CHECK_THROWS_AS(small() * x, Error);
}

TEST_CASE("matrix market output")
{
  std::ostringstream out;
  write_matrix_market(small(), out);
  const std::string s = out.str();
  CHECK(s.rfind("%%MatrixMarket matrix coordinate real symmetric", 0) == 0);
  CHECK(s.find("3 3 5\n") != std::string::npos);
}
