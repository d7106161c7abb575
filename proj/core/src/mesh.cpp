#include "rdmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>

#include "rdmg/error.hpp"

namespace rdmg
{

namespace
{

constexpr double lattice_tol = 1e-12;

double distance(const Point &a, const Point &b)
{
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Point midpoint(const Point &a, const Point &b)
{
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

// Sorted squared edge lengths of a tetrahedron.
std::array<double, 6> edge_profile(const Mesh &mesh, std::array<std::int32_t, 4> t)
{
  std::array<double, 6> e{};
  int k = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
    {
      const double d = distance(mesh.vertices[t[a]], mesh.vertices[t[b]]);
      e[k++] = d * d;
    }
  std::sort(e.begin(), e.end());
  return e;
}

bool same_profile(const std::array<double, 6> &a, const std::array<double, 6> &b)
{
  for (int i = 0; i < 6; ++i)
    if (std::abs(a[i] - b[i]) > 1e-10 * b[5])
      return false;
  return true;
}

void orient_positively(const Mesh &mesh, Cell &cell)
{
  const auto &v = mesh.vertices;
  double s;
  if (mesh.dim == 2)
  {
    const Point &a = v[cell[0]], &b = v[cell[1]], &c = v[cell[2]];
    s = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if (s < 0.0)
      std::swap(cell[1], cell[2]);
  }
  else
  {
    const Point &a = v[cell[0]], &b = v[cell[1]], &c = v[cell[2]], &d = v[cell[3]];
    const double e1[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double e2[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const double e3[3] = {d[0] - a[0], d[1] - a[1], d[2] - a[2]};
    s = e1[0] * (e2[1] * e3[2] - e2[2] * e3[1]) - e1[1] * (e2[0] * e3[2] - e2[2] * e3[0]) +
        e1[2] * (e2[0] * e3[1] - e2[1] * e3[0]);
    if (s < 0.0)
      std::swap(cell[2], cell[3]);
  }
  if (s == 0.0)
    fail(ErrorKind::geometry, "degenerate cell produced during mesh construction");
}

double max_edge_length(const Mesh &mesh)
{
  double h = 0.0;
  const int nv = mesh.vertices_per_cell();
  for (const Cell &c : mesh.cells)
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b)
        h = std::max(h, distance(mesh.vertices[c[a]], mesh.vertices[c[b]]));
  return h;
}

void flag_boundary_vertices(Mesh &mesh)
{
  mesh.vertex_is_dirichlet.assign(mesh.num_vertices(), 0);
  for (const BoundaryFace &f : boundary_faces(mesh))
  {
    const auto cell = mesh.cell(f.cell);
    for (int a = 0; a < mesh.vertices_per_cell(); ++a)
      if (a != f.opposite)
        mesh.vertex_is_dirichlet[cell[a]] = 1;
  }
}

bool on_lattice(double x, int n)
{
  const double scaled = x * n;
  return std::abs(scaled - std::round(scaled)) <= lattice_tol * n;
}

bool inside(const Box &box, const Point &p, int dim)
{
  for (int d = 0; d < dim; ++d)
    if (p[d] <= box.lo[d] || p[d] >= box.hi[d])
      return false;
  return true;
}

} // namespace

int Mesh::num_subdomains() const
{
  int m = 0;
  for (int s : cell_subdomain)
    m = std::max(m, s);
  return m;
}

std::size_t Mesh::num_dirichlet() const
{
  return static_cast<std::size_t>(std::count(vertex_is_dirichlet.begin(), vertex_is_dirichlet.end(), 1));
}

std::vector<Box> default_inclusions()
{
  return {Box{{0.25, 0.25, 0.25}, {0.5, 0.5, 0.5}}, Box{{0.5, 0.5, 0.5}, {0.75, 0.75, 0.75}}};
}

Mesh build_cube_mesh(int cells_per_edge, std::span<const Box> inclusions)
{
  const int n = cells_per_edge;
  if (n < 2)
    fail(ErrorKind::size, "cells_per_edge must be at least 2, got " + std::to_string(n));
  for (const Box &box : inclusions)
  {
    for (int d = 0; d < 3; ++d)
    {
      if (!on_lattice(box.lo[d], n) || !on_lattice(box.hi[d], n) || box.lo[d] < 0.0 ||
          box.hi[d] > 1.0 || box.lo[d] >= box.hi[d])
        fail(ErrorKind::alignment, "inclusion box is not aligned with the " + std::to_string(n) +
                                       "^3 cell lattice");
    }
  }

  Mesh mesh;
  mesh.dim = 3;
  const int np = n + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(np) * np * np);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        mesh.vertices.push_back({double(i) / n, double(j) / n, double(k) / n});

  auto vid = [np](int i, int j, int k) { return static_cast<std::int32_t>(i + np * (j + np * k)); };

  // Kuhn split: one tetrahedron per monotone path from corner 000 to 111.
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  mesh.cells.reserve(6u * n * n * n);
  mesh.cell_subdomain.reserve(6u * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
      {
        const Point centre{(i + 0.5) / n, (j + 0.5) / n, (k + 0.5) / n};
        int label = 1;
        for (const Box &box : inclusions)
          if (inside(box, centre, 3))
            label = 2;
        for (const auto &perm : perms)
        {
          int off[3] = {0, 0, 0};
          Cell cell{vid(i, j, k), 0, 0, 0};
          for (int s = 0; s < 3; ++s)
          {
            off[perm[s]] = 1;
            cell[s + 1] = vid(i + off[0], j + off[1], k + off[2]);
          }
          orient_positively(mesh, cell);
          mesh.cells.push_back(cell);
          mesh.cell_subdomain.push_back(label);
        }
      }
  mesh.h = max_edge_length(mesh);
  flag_boundary_vertices(mesh);
  return mesh;
}

Mesh build_square_mesh(int cells_per_edge, std::uint64_t assignment_seed)
{
  const int n = cells_per_edge;
  if (n < 2)
    fail(ErrorKind::size, "cells_per_edge must be at least 2, got " + std::to_string(n));

  Mesh mesh;
  mesh.dim = 2;
  const int np = n + 1;
  for (int j = 0; j < np; ++j)
    for (int i = 0; i < np; ++i)
      mesh.vertices.push_back({double(i) / n, double(j) / n, 0.0});
  auto vid = [np](int i, int j) { return static_cast<std::int32_t>(i + np * j); };

  std::mt19937_64 rng(assignment_seed);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
    {
      const Cell lower{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), -1};
      const Cell upper{vid(i, j), vid(i + 1, j + 1), vid(i, j + 1), -1};
      for (const Cell &c : {lower, upper})
      {
        mesh.cells.push_back(c);
        mesh.cell_subdomain.push_back(1 + static_cast<int>(rng() >> 63));
      }
    }
  mesh.h = max_edge_length(mesh);
  flag_boundary_vertices(mesh);
  return mesh;
}

Mesh refine_uniform(const Mesh &mesh)
{
  Mesh fine;
  fine.dim = mesh.dim;
  fine.level = mesh.level + 1;
  fine.vertices = mesh.vertices;
  fine.vertex_parents.reserve(mesh.num_vertices() * (mesh.dim == 3 ? 8 : 4));
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    fine.vertex_parents.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(i)});

  const std::uint64_t nv = mesh.num_vertices();
  std::unordered_map<std::uint64_t, std::int32_t> edge_mid;
  edge_mid.reserve(mesh.num_cells() * 2);
  auto mid = [&](std::int32_t a, std::int32_t b) {
    const std::uint64_t lo = std::min(a, b), hi = std::max(a, b);
    auto [it, inserted] = edge_mid.try_emplace(lo * nv + hi, static_cast<std::int32_t>(fine.vertices.size()));
    if (inserted)
    {
      fine.vertices.push_back(midpoint(mesh.vertices[a], mesh.vertices[b]));
      fine.vertex_parents.push_back({static_cast<std::int32_t>(lo), static_cast<std::int32_t>(hi)});
    }
    return it->second;
  };

  const std::size_t children = mesh.dim == 3 ? 8 : 4;
  fine.cells.reserve(mesh.num_cells() * children);
  fine.cell_subdomain.reserve(mesh.num_cells() * children);
  fine.cell_parent.reserve(mesh.num_cells() * children);

  auto emit = [&](Cell c, std::size_t parent) {
    orient_positively(fine, c);
    fine.cells.push_back(c);
    fine.cell_subdomain.push_back(mesh.cell_subdomain[parent]);
    fine.cell_parent.push_back(static_cast<std::int32_t>(parent));
  };

  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const Cell &p = mesh.cells[c];
    if (mesh.dim == 2)
    {
      const auto m01 = mid(p[0], p[1]), m12 = mid(p[1], p[2]), m02 = mid(p[0], p[2]);
      emit({p[0], m01, m02, -1}, c);
      emit({m01, p[1], m12, -1}, c);
      emit({m02, m12, p[2], -1}, c);
      emit({m01, m12, m02, -1}, c);
      continue;
    }
    const auto m01 = mid(p[0], p[1]), m02 = mid(p[0], p[2]), m03 = mid(p[0], p[3]);
    const auto m12 = mid(p[1], p[2]), m13 = mid(p[1], p[3]), m23 = mid(p[2], p[3]);
    emit({p[0], m01, m02, m03}, c);
    emit({m01, p[1], m12, m13}, c);
    emit({m02, m12, p[2], m23}, c);
    emit({m03, m13, m23, p[3]}, c);

    // Octahedron: opposite midpoint pairs are the candidate diagonals. Take
    // the shortest; on a tie prefer a cut whose inner children are congruent
    // to the corner children, which keeps a Kuhn mesh a Kuhn mesh.
    const std::array<std::array<std::int32_t, 2>, 3> pairs{{{m01, m23}, {m02, m13}, {m03, m12}}};
    const auto corner_shape = edge_profile(fine, {p[0], m01, m02, m03});
    double len[3];
    for (int d = 0; d < 3; ++d)
      len[d] = distance(fine.vertices[pairs[d][0]], fine.vertices[pairs[d][1]]);
    const double shortest = std::min({len[0], len[1], len[2]});
    int best = -1;
    for (int d = 0; d < 3 && best < 0; ++d)
    {
      if (len[d] > shortest * (1 + 1e-12))
        continue;
      const auto &q = pairs[(d + 1) % 3];
      const auto &r = pairs[(d + 2) % 3];
      const std::int32_t ring[4] = {q[0], r[0], q[1], r[1]};
      bool congruent = true;
      for (int s = 0; s < 4 && congruent; ++s)
        congruent = same_profile(edge_profile(fine, {pairs[d][0], pairs[d][1], ring[s], ring[(s + 1) % 4]}),
                                 corner_shape);
      if (congruent)
        best = d;
    }
    if (best < 0)
      best = static_cast<int>(std::min_element(len, len + 3) - len);
    const auto [a, b] = pairs[best];
    const auto &q = pairs[(best + 1) % 3];
    const auto &r = pairs[(best + 2) % 3];
    const std::int32_t ring[4] = {q[0], r[0], q[1], r[1]};
    for (int s = 0; s < 4; ++s)
      emit({a, b, ring[s], ring[(s + 1) % 4]}, c);
  }

  // A fine vertex is on the boundary iff it lies on a coarse boundary face.
  fine.vertex_is_dirichlet.assign(fine.vertices.size(), 0);
  for (const BoundaryFace &f : boundary_faces(mesh))
  {
    const auto cell = mesh.cell(f.cell);
    std::int32_t face[3];
    int nf = 0;
    for (int a = 0; a < mesh.vertices_per_cell(); ++a)
      if (a != f.opposite)
        face[nf++] = cell[a];
    for (int a = 0; a < nf; ++a)
    {
      fine.vertex_is_dirichlet[face[a]] = 1;
      for (int b = a + 1; b < nf; ++b)
      {
        const std::uint64_t lo = std::min(face[a], face[b]), hi = std::max(face[a], face[b]);
        fine.vertex_is_dirichlet[edge_mid.at(lo * nv + hi)] = 1;
      }
    }
  }
  fine.h = max_edge_length(fine);
  return fine;
}

MeshHierarchy build_hierarchy(Mesh coarse, int finest_level)
{
  if (finest_level < 0)
    fail(ErrorKind::size, "hierarchy depth must be non-negative");
  MeshHierarchy hierarchy;
  hierarchy.levels.reserve(static_cast<std::size_t>(finest_level) + 1);
  coarse.level = 0;
  hierarchy.levels.push_back(std::move(coarse));
  for (int k = 1; k <= finest_level; ++k)
    hierarchy.levels.push_back(refine_uniform(hierarchy.levels.back()));
  return hierarchy;
}

double signed_volume(const Mesh &mesh, std::size_t c)
{
  const Cell &cell = mesh.cells[c];
  const auto &v = mesh.vertices;
  if (mesh.dim == 2)
  {
    const Point &a = v[cell[0]], &b = v[cell[1]], &d = v[cell[2]];
    return 0.5 * ((b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]));
  }
  const Point &a = v[cell[0]], &b = v[cell[1]], &d = v[cell[2]], &e = v[cell[3]];
  const double e1[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const double e2[3] = {d[0] - a[0], d[1] - a[1], d[2] - a[2]};
  const double e3[3] = {e[0] - a[0], e[1] - a[1], e[2] - a[2]};
  return (e1[0] * (e2[1] * e3[2] - e2[2] * e3[1]) - e1[1] * (e2[0] * e3[2] - e2[2] * e3[0]) +
          e1[2] * (e2[0] * e3[1] - e2[1] * e3[0])) /
         6.0;
}

double cell_volume(const Mesh &mesh, std::size_t c) { return std::abs(signed_volume(mesh, c)); }

Point barycenter(const Mesh &mesh, std::size_t c)
{
  Point p{0.0, 0.0, 0.0};
  const auto cell = mesh.cell(c);
  for (auto v : cell)
    for (int d = 0; d < 3; ++d)
      p[d] += mesh.vertices[v][d];
  for (double &x : p)
    x /= static_cast<double>(cell.size());
  return p;
}

std::vector<BoundaryFace> boundary_faces(const Mesh &mesh)
{
  struct Entry
  {
    std::array<std::int32_t, 3> key;
    std::int32_t cell;
    int opposite;
  };
  const int nv = mesh.vertices_per_cell();
  std::vector<Entry> entries;
  entries.reserve(mesh.num_cells() * static_cast<std::size_t>(nv));
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const auto cell = mesh.cell(c);
    for (int o = 0; o < nv; ++o)
    {
      std::array<std::int32_t, 3> key{-1, -1, -1};
      int n = 0;
      for (int a = 0; a < nv; ++a)
        if (a != o)
          key[n++] = cell[a];
      std::sort(key.begin(), key.begin() + n);
      entries.push_back({key, static_cast<std::int32_t>(c), o});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
    return a.key != b.key ? a.key < b.key : a.cell < b.cell;
  });

  std::vector<BoundaryFace> faces;
  for (std::size_t i = 0; i < entries.size();)
  {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].key == entries[i].key)
      ++j;
    if (j - i == 1)
      faces.push_back({entries[i].cell, entries[i].opposite});
    else if (j - i > 2)
      fail(ErrorKind::structure, "non-manifold face shared by more than two cells");
    i = j;
  }
  std::sort(faces.begin(), faces.end(), [](const BoundaryFace &a, const BoundaryFace &b) {
    return a.cell != b.cell ? a.cell < b.cell : a.opposite < b.opposite;
  });
  return faces;
}

void write_mesh_ascii(const Mesh &mesh, std::ostream &out)
{
  const auto old_precision = out.precision(17);
  out << "# rdmg mesh dim " << mesh.dim << " level " << mesh.level << " h " << mesh.h << '\n';
  out << "vertices " << mesh.num_vertices() << '\n';
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
  {
    const Point &p = mesh.vertices[i];
    out << p[0] << ' ' << p[1];
    if (mesh.dim == 3)
      out << ' ' << p[2];
    out << ' ' << int(mesh.vertex_is_dirichlet[i]) << '\n';
  }
  out << "cells " << mesh.num_cells() << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    for (auto v : mesh.cell(c))
      out << v << ' ';
    out << mesh.cell_subdomain[c] << '\n';
  }
  out.precision(old_precision);
}

} // namespace rdmg
