#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rdmg/assembly.hpp"
#include "rdmg/error.hpp"
#include "rdmg/theory.hpp"

using namespace rdmg;

namespace
{

double max_abs_diff(const Vector &a, const Vector &b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const Vector &a)
{
  double m = 0.0;
  for (double x : a)
    m = std::max(m, std::abs(x));
  return m;
}

} // namespace

TEST_CASE("inverse element mass")
{
  const LocalMatrix a = inverse_element_mass(0.5, 2);
  CHECK(a(0, 0) == doctest::Approx(18.0));
  CHECK(a(0, 1) == doctest::Approx(-6.0));
  const std::vector<Point> tet{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const LocalMatrix m = element_mass(tet, 3, 1.0);
  CHECK((inverse_element_mass(1.0 / 6.0, 3) * m - LocalMatrix::Identity(4, 4)).norm() < 1e-13);
}

TEST_CASE("dual basis is biorthogonal")
{
  const auto boxes = default_inclusions();
  CHECK(biorthogonality_error(build_cube_mesh(4, boxes)) < 1e-12);
  CHECK(biorthogonality_error(build_square_mesh(6, 1)) < 1e-12);
}

TEST_CASE("associated cells respect the ordering")
{
  const Mesh m = build_square_mesh(6, 4);
  const std::vector<int> order{2, 1};
  const DualBasisCache cache(m, order);
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
  {
    bool touches_two = false;
    for (std::size_t c = 0; c < m.num_cells(); ++c)
    {
      const auto cell = m.cell(c);
      if (std::find(cell.begin(), cell.end(), static_cast<std::int32_t>(v)) != cell.end() && m.cell_subdomain[c] == 2)
        touches_two = true;
    }
    const auto a = static_cast<std::size_t>(cache.associated_cell(v));
    CHECK(m.cell_subdomain[a] == (touches_two ? 2 : 1));
    CHECK(m.cells[a][static_cast<std::size_t>(cache.local_index(v))] == static_cast<std::int32_t>(v));
  }
}

TEST_CASE("dual interpolant is a projection onto V_k")
{
  const MeshHierarchy h = build_hierarchy(build_square_mesh(6, 2), 2);
  const std::vector<int> order{1, 2};
  const DualInterpolator pi(h, order);
  const Vector v = random_function(h.finest(), 9);
  for (int k = 0; k <= 2; ++k)
  {
    const Vector vk = pi.apply(k, v);
    CHECK(vk.size() == h[k].num_vertices());
    for (std::size_t i = 0; i < vk.size(); ++i)
      if (h[k].vertex_is_dirichlet[i])
        CHECK(vk[i] == 0.0);
    const Vector again = pi.apply(k, prolong_vertices(h, k, 2, vk));
    CHECK(max_abs_diff(again, vk) <= 1e-12 * max_abs(vk));
    CHECK(max_abs_diff(dual_interpolate(h, k, v, order), vk) <= 1e-14 * max_abs(vk));
  }
  CHECK(max_abs_diff(pi.apply(2, v), v) <= 1e-12 * max_abs(v));
}

TEST_CASE("free and vertex vectors")
{
  const Mesh m = build_square_mesh(4, 1);
  const Vector v = random_function(m, 3);
  CHECK(v == random_function(m, 3));
  CHECK(v != random_function(m, 4));
  const Vector f = to_free(m, v);
  CHECK(f.size() == 9);
  CHECK(to_vertices(m, f) == v);
}

TEST_CASE("weighted norms of a hat function")
{
  // 4x4 square, hat at vertex (2,2): 6 triangles of area 1/32.
  const Mesh m = build_square_mesh(4, 1);
  Vector v(m.num_vertices(), 0.0);
  v[2 + 5 * 2] = 1.0;
  const auto tau = CoefficientField::omega({3.0, 3.0});
  CHECK(weighted_h1_seminorm2(m, v, tau) == doctest::Approx(12.0));
  CHECK(weighted_l2_norm2(m, v, tau) == doctest::Approx(3.0 / 32.0));
}

TEST_CASE("weighted L2 projection")
{
  const MeshHierarchy h = build_hierarchy(build_square_mesh(6, 5), 2);
  const auto tau = CoefficientField::rho({1.0, 1e-4});
  const Vector v = random_function(h.finest(), 11);
  const Vector q = weighted_l2_project(h, 1, v, tau);
  const Vector qf = prolong_vertices(h, 1, 2, q);
  Vector d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    d[i] = v[i] - qf[i];
  const double lhs = weighted_l2_norm2(h.finest(), v, tau);
  const double rhs = weighted_l2_norm2(h.finest(), qf, tau) + weighted_l2_norm2(h.finest(), d, tau);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
  // Functions of V_1 are reproduced.
  const Vector back = weighted_l2_project(h, 1, qf, tau);
  CHECK(max_abs_diff(back, q) <= 1e-9 * max_abs(q));
  CHECK_THROWS_AS(weighted_l2_project(h, 3, v, tau), Error);
}

TEST_CASE("multilevel decomposition sums to the input")
{
  const auto boxes = default_inclusions();
  const MeshHierarchy h = build_hierarchy(build_cube_mesh(4, boxes), 2);
  const auto w = CoefficientField::omega({1.0, 1e-6});
  const auto r = CoefficientField::rho({1.0, 1e-6});
  const std::vector<int> order{1, 2};
  const Vector v = random_function(h.finest(), 5);
  const DecompositionReport d = measure_decomposition(h, w, r, order, v);
  CHECK(d.pieces.size() == 3);
  CHECK(d.reconstruction_error <= 1e-12);
  CHECK(d.v_energy == doctest::Approx(d.v_h1_omega + d.v_l2_rho));
  CHECK(d.energy_ratio() > 0.0);
}

TEST_CASE("mean-zero projection on floating pieces")
{
  const auto boxes = default_inclusions();
  const Mesh m = build_cube_mesh(4, boxes);
  const auto info = analyze_subdomains(m, CoefficientField::omega({1.0, 1e-8}));
  const Eigen::MatrixXd c = floating_constraints(m, info);
  CHECK(c.cols() == 1);
  const Vector v = project_mean_zero(m, info, random_function(m, 2));
  const Vector f = to_free(m, v);
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  CHECK(std::abs((c.transpose() * fv)(0)) < 1e-14);
}

TEST_CASE("random function inside one label")
{
  const MeshHierarchy h = build_hierarchy(build_square_mesh(6, 1), 2);
  const Mesh &m = h.finest();
  const Vector v = random_function_in(m, 2, 1);
  bool any = false;
  for (std::size_t c = 0; c < m.num_cells(); ++c)
    if (m.cell_subdomain[c] != 2)
      for (auto i : m.cell(c))
        CHECK(v[static_cast<std::size_t>(i)] == 0.0);
  for (double x : v)
    any = any || x != 0.0;
  CHECK(any);
}

TEST_CASE("strengthened cauchy-schwarz decay")
{
  const MeshHierarchy h = build_hierarchy(build_square_mesh(6, 1), 4);
  const ScsReport s = measure_scs(h, CoefficientField::omega({1.0, 1.0}), 20, 3);
  CHECK(s.c.rows() == 5);
  for (int j = 0; j < 5; ++j)
    CHECK(s.c(j, j) > 0.0);
  CHECK(s.mean_band_ratio > 1.0);
  CHECK(s.decay_exponent > 0.0);
}
