#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rdmg/error.hpp"
#include "rdmg/mesh.hpp"

using namespace rdmg;

namespace
{

double total_volume(const Mesh &m)
{
  double v = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c)
    v += cell_volume(m, c);
  return v;
}

bool on_boundary(const Point &p, int dim)
{
  for (int d = 0; d < dim; ++d)
    if (std::abs(p[d]) < 1e-14 || std::abs(p[d] - 1.0) < 1e-14)
      return true;
  return false;
}

std::vector<double> edge_profile(const Mesh &m, std::size_t c)
{
  std::vector<double> e;
  const auto v = m.cell(c);
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b)
    {
      double d2 = 0.0;
      for (int r = 0; r < m.dim; ++r)
      {
        const double d = m.vertices[v[a]][r] - m.vertices[v[b]][r];
        d2 += d * d;
      }
      e.push_back(d2);
    }
  std::sort(e.begin(), e.end());
  return e;
}

} // namespace

TEST_CASE("cube mesh counts, labels and volumes")
{
  const auto boxes = default_inclusions();
  const Mesh m = build_cube_mesh(4, boxes);
  CHECK(m.dim == 3);
  CHECK(m.num_vertices() == 125);
  CHECK(m.num_cells() == 6 * 64);
  CHECK(std::count(m.cell_subdomain.begin(), m.cell_subdomain.end(), 2) == 12);
  CHECK(m.num_subdomains() == 2);
  CHECK(total_volume(m) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t c = 0; c < m.num_cells(); ++c)
    CHECK(signed_volume(m, c) == doctest::Approx(1.0 / (6 * 64)).epsilon(1e-12));
  CHECK(m.h == doctest::Approx(std::sqrt(3.0) / 4));
}

TEST_CASE("inclusion labels follow the cell centre")
{
  const auto boxes = default_inclusions();
  const Mesh m = build_cube_mesh(8, boxes);
  for (std::size_t c = 0; c < m.num_cells(); ++c)
  {
    const Point b = barycenter(m, c);
    const bool in1 = b[0] > 0.25 && b[0] < 0.5 && b[1] > 0.25 && b[1] < 0.5 && b[2] > 0.25 && b[2] < 0.5;
    const bool in2 = b[0] > 0.5 && b[0] < 0.75 && b[1] > 0.5 && b[1] < 0.75 && b[2] > 0.5 && b[2] < 0.75;
    CHECK(m.cell_subdomain[c] == (in1 || in2 ? 2 : 1));
  }
}

TEST_CASE("dirichlet flags are exactly the boundary vertices")
{
  const auto boxes = default_inclusions();
  const Mesh m = build_cube_mesh(4, boxes);
  CHECK(m.num_dirichlet() == 125 - 27);
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    CHECK(bool(m.vertex_is_dirichlet[v]) == on_boundary(m.vertices[v], 3));

  const Mesh r = refine_uniform(m);
  CHECK(r.num_dirichlet() == 729 - 343);
  for (std::size_t v = 0; v < r.num_vertices(); ++v)
    CHECK(bool(r.vertex_is_dirichlet[v]) == on_boundary(r.vertices[v], 3));
}

TEST_CASE("boundary faces of the cube and the square")
{
  const auto boxes = default_inclusions();
  CHECK(boundary_faces(build_cube_mesh(4, boxes)).size() == 6u * 2 * 16);
  CHECK(boundary_faces(build_square_mesh(6, 1)).size() == 4u * 6);
}

TEST_CASE("refinement is nested and conforming")
{
  const auto boxes = default_inclusions();
  const Mesh c = build_cube_mesh(4, boxes);
  const Mesh f = refine_uniform(c);
  CHECK(f.level == 1);
  CHECK(f.num_vertices() == 729);
  CHECK(f.num_cells() == 8 * c.num_cells());
  CHECK(f.h == doctest::Approx(c.h / 2));
  for (std::size_t v = 0; v < c.num_vertices(); ++v)
  {
    CHECK(f.vertices[v] == c.vertices[v]);
    CHECK(f.vertex_parents[v][0] == static_cast<std::int32_t>(v));
    CHECK(f.vertex_parents[v][1] == static_cast<std::int32_t>(v));
  }
  for (std::size_t v = c.num_vertices(); v < f.num_vertices(); ++v)
  {
    const auto [a, b] = f.vertex_parents[v];
    for (int d = 0; d < 3; ++d)
      CHECK(f.vertices[v][d] == doctest::Approx(0.5 * (c.vertices[a][d] + c.vertices[b][d])));
  }
  CHECK(total_volume(f) == doctest::Approx(1.0).epsilon(1e-13));
  // Children fill their parent and inherit its label.
  std::vector<double> child_volume(c.num_cells(), 0.0);
  for (std::size_t k = 0; k < f.num_cells(); ++k)
  {
    const auto p = static_cast<std::size_t>(f.cell_parent[k]);
    child_volume[p] += cell_volume(f, k);
    CHECK(f.cell_subdomain[k] == c.cell_subdomain[p]);
    CHECK(signed_volume(f, k) > 0.0);
  }
  for (std::size_t p = 0; p < c.num_cells(); ++p)
    CHECK(child_volume[p] == doctest::Approx(cell_volume(c, p)).epsilon(1e-12));
  // Conformity: only the outer skin is unmatched.
  CHECK(boundary_faces(f).size() == 6u * 2 * 64);
}

TEST_CASE("refined Kuhn cells stay congruent")
{
  const auto boxes = default_inclusions();
  const MeshHierarchy h = build_hierarchy(build_cube_mesh(4, boxes), 2);
  for (const Mesh &m : h.levels)
  {
    const auto ref = edge_profile(m, 0);
    for (std::size_t c = 0; c < m.num_cells(); ++c)
    {
      const auto e = edge_profile(m, c);
      for (std::size_t i = 0; i < e.size(); ++i)
        CHECK(e[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("square mesh labels are reproducible from the seed")
{
  const Mesh a = build_square_mesh(6, 1);
  const Mesh b = build_square_mesh(6, 1);
  const Mesh c = build_square_mesh(6, 2);
  CHECK(a.num_vertices() == 49);
  CHECK(a.num_cells() == 72);
  CHECK(a.cell_subdomain == b.cell_subdomain);
  CHECK(a.cell_subdomain != c.cell_subdomain);
  CHECK(std::set<int>(a.cell_subdomain.begin(), a.cell_subdomain.end()) == std::set<int>{1, 2});
  CHECK(total_volume(a) == doctest::Approx(1.0));
  CHECK(a.num_dirichlet() == 24);
}

TEST_CASE("square refinement")
{
  const MeshHierarchy h = build_hierarchy(build_square_mesh(6, 3), 3);
  CHECK(h.finest_level() == 3);
  CHECK(h.finest().num_vertices() == 49u * 49);
  CHECK(h.finest().num_cells() == 72u * 64);
  CHECK(h.finest().num_free() == 47u * 47);
  CHECK(h[2].h == doctest::Approx(h[0].h / 4));
  CHECK(boundary_faces(h.finest()).size() == 4u * 48);
}

TEST_CASE("mesh construction errors")
{
  const auto boxes = default_inclusions();
  CHECK_THROWS_AS(build_cube_mesh(1, boxes), Error);
  try
  {
    build_cube_mesh(6, boxes);
    FAIL("misaligned inclusion accepted");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::alignment);
  }
  try
  {
    build_hierarchy(build_square_mesh(2, 1), -1);
    FAIL("negative level accepted");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::size);
  }
}

TEST_CASE("ascii dump has header and tables")
{
  const Mesh m = build_square_mesh(2, 1);
  std::ostringstream out;
  write_mesh_ascii(m, out);
  const std::string s = out.str();
  CHECK(s.find("vertices 9\n") != std::string::npos);
  CHECK(s.find("cells 8\n") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 1 + 9 + 1 + 8);
}
