#ifndef RDMG_MESH_HPP
#define RDMG_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace rdmg
{

using Point = std::array<double, 3>;

// Simplex as vertex indices. Triangles leave the last slot at -1.
using Cell = std::array<std::int32_t, 4>;

// Axis-aligned box [lo, hi] used to describe material inclusions.
struct Box
{
  Point lo{};
  Point hi{};
};

//
// Conforming simplicial mesh of the unit square or cube with material labels.
//
// Subdomain labels are 1-based (Omega_1, Omega_2, ...). Vertices created by
// refinement keep the parent vertex numbering as a prefix, so the vertex set of
// a coarse level is literally the first num_vertices() entries of the next one.
//
struct Mesh
{
  int dim = 0;
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<int> cell_subdomain;
  std::vector<std::uint8_t> vertex_is_dirichlet;
  int level = 0;
  double h = 0.0;

  // Refinement provenance, empty on a coarse mesh. vertex_parents[i] is
  // {i, i} for an inherited vertex and the bisected edge for a midpoint.
  std::vector<std::array<std::int32_t, 2>> vertex_parents;
  std::vector<std::int32_t> cell_parent;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_cells() const { return cells.size(); }
  int vertices_per_cell() const { return dim + 1; }
  std::span<const std::int32_t> cell(std::size_t c) const
  {
    return {cells[c].data(), static_cast<std::size_t>(dim + 1)};
  }
  int num_subdomains() const;
  std::size_t num_dirichlet() const;
  std::size_t num_free() const { return num_vertices() - num_dirichlet(); }
};

// Face of the domain boundary, identified by its owning cell and the local
// index of the opposite vertex.
struct BoundaryFace
{
  std::int32_t cell = -1;
  int opposite = -1;
};

struct MeshHierarchy
{
  std::vector<Mesh> levels;
  // Ratio h_k / h_{k-1} of the uniform refinement.
  double gamma = 0.5;

  int finest_level() const { return static_cast<int>(levels.size()) - 1; }
  const Mesh &finest() const { return levels.back(); }
  const Mesh &operator[](std::size_t k) const { return levels[k]; }
};

// The two lattice-aligned cubes [1/4,1/2]^3 and [1/2,3/4]^3 touching at the
// centre of the domain.
std::vector<Box> default_inclusions();

// Unit cube, cells_per_edge^3 sub-cubes each cut into 6 Kuhn tetrahedra.
// Cells inside any inclusion get subdomain 2, all others subdomain 1.
Mesh build_cube_mesh(int cells_per_edge, std::span<const Box> inclusions);

// Unit square, cells_per_edge^2 squares cut along the (0,0)-(1,1) diagonal.
// Each triangle is assigned subdomain 1 or 2 from a seeded mt19937_64 stream.
Mesh build_square_mesh(int cells_per_edge, std::uint64_t assignment_seed);

// Red refinement: 4 children per triangle, 8 per tetrahedron. The interior
// octahedron of a tetrahedron is cut along its shortest diagonal.
Mesh refine_uniform(const Mesh &mesh);

MeshHierarchy build_hierarchy(Mesh coarse, int finest_level);

double signed_volume(const Mesh &mesh, std::size_t c);
double cell_volume(const Mesh &mesh, std::size_t c);
Point barycenter(const Mesh &mesh, std::size_t c);

std::vector<BoundaryFace> boundary_faces(const Mesh &mesh);

// Plain ASCII dump: header, vertex table (x y z dirichlet), cell table
// (vertex indices followed by the subdomain label).
void write_mesh_ascii(const Mesh &mesh, std::ostream &out);

} // namespace rdmg

#endif // RDMG_MESH_HPP
