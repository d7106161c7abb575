#include "rdmg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rdmg/error.hpp"

namespace rdmg
{

namespace
{

std::vector<Point> gather(const Mesh &mesh, std::size_t cell)
{
  std::vector<Point> pts;
  pts.reserve(4);
  for (auto v : mesh.cell(cell))
    pts.push_back(mesh.vertices[v]);
  return pts;
}

double simplex_volume(std::span<const Point> simplex, int dim, Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> &jac)
{
  jac.resize(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r)
      jac(r, c) = simplex[c + 1][r] - simplex[0][r];
  const double det = jac.determinant();
  const double factorial = dim == 2 ? 2.0 : 6.0;
  const double vol = std::abs(det) / factorial;
  double scale = 0.0;
  for (int c = 0; c < dim; ++c)
    scale = std::max(scale, jac.col(c).norm());
  if (!(vol > 1e-14 * std::pow(scale, dim)))
    fail(ErrorKind::geometry, "degenerate simplex");
  return vol;
}

// Per-row sorted column patterns of the free-vertex graph.
SparseMatrix pattern(const Mesh &mesh, const DofMap &dofs)
{
  const std::size_t n = dofs.size();
  std::vector<std::size_t> bound(n + 1, 0);
  const int nv = mesh.vertices_per_cell();
  for (const Cell &c : mesh.cells)
    for (int a = 0; a < nv; ++a)
      if (const auto i = dofs.vertex_to_dof[c[a]]; i >= 0)
        bound[static_cast<std::size_t>(i) + 1] += static_cast<std::size_t>(nv);
  for (std::size_t i = 0; i < n; ++i)
    bound[i + 1] += bound[i];

  std::vector<std::int32_t> slots(bound[n]);
  std::vector<std::size_t> fill(n, 0);
  for (const Cell &c : mesh.cells)
    for (int a = 0; a < nv; ++a)
    {
      const auto i = dofs.vertex_to_dof[c[a]];
      if (i < 0)
        continue;
      const std::size_t base = bound[i];
      for (int b = 0; b < nv; ++b)
      {
        const auto j = dofs.vertex_to_dof[c[b]];
        if (j < 0)
          continue;
        auto first = slots.begin() + static_cast<std::ptrdiff_t>(base);
        auto last = first + static_cast<std::ptrdiff_t>(fill[i]);
        if (std::find(first, last, j) == last)
          slots[base + fill[i]++] = j;
      }
    }

  std::vector<std::size_t> row_ptr(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    row_ptr[i + 1] = row_ptr[i] + fill[i];
  std::vector<std::int32_t> cols(row_ptr[n]);
  for (std::size_t i = 0; i < n; ++i)
  {
    std::copy_n(slots.begin() + static_cast<std::ptrdiff_t>(bound[i]), fill[i],
                cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]));
    std::sort(cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]),
              cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]));
  }
  Vector vals(cols.size(), 0.0);
  return {n, n, std::move(row_ptr), std::move(cols), std::move(vals)};
}

void check_labels(const Mesh &mesh, std::span<const double> weights, const char *what)
{
  if (static_cast<int>(weights.size()) < mesh.num_subdomains())
    fail(ErrorKind::configuration, std::string(what) + " has " + std::to_string(weights.size()) +
                                       " values but the mesh uses " + std::to_string(mesh.num_subdomains()) +
                                       " subdomains");
}

} // namespace

DofMap make_dof_map(const Mesh &mesh)
{
  DofMap dofs;
  dofs.vertex_to_dof.assign(mesh.num_vertices(), -1);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.vertex_is_dirichlet[v])
    {
      dofs.vertex_to_dof[v] = static_cast<std::int32_t>(dofs.dof_to_vertex.size());
      dofs.dof_to_vertex.push_back(static_cast<std::int32_t>(v));
    }
  return dofs;
}

Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 3> barycentric_gradients(std::span<const Point> simplex,
                                                                                   int dim)
{
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> jac;
  simplex_volume(simplex, dim, jac);
  // x = x0 + J xi, so grad(lambda_i) for i >= 1 is row i-1 of J^{-1}.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> inv = jac.inverse();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 3> grads(dim + 1, dim);
  grads.bottomRows(dim) = inv;
  grads.row(0) = -inv.colwise().sum();
  return grads;
}

LocalMatrix element_stiffness(std::span<const Point> simplex, int dim, double omega)
{
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> jac;
  const double vol = simplex_volume(simplex, dim, jac);
  const auto grads = barycentric_gradients(simplex, dim);
  return omega * vol * (grads * grads.transpose());
}

LocalMatrix element_mass(std::span<const Point> simplex, int dim, double rho)
{
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> jac;
  const double vol = simplex_volume(simplex, dim, jac);
  const double scale = rho * vol / ((dim + 1) * (dim + 2));
  LocalMatrix m = LocalMatrix::Constant(dim + 1, dim + 1, scale);
  m.diagonal().array() += scale;
  return m;
}

LocalMatrix element_stiffness(const Mesh &mesh, std::size_t cell, double omega)
{
  const auto pts = gather(mesh, cell);
  return element_stiffness(pts, mesh.dim, omega);
}

LocalMatrix element_mass(const Mesh &mesh, std::size_t cell, double rho)
{
  const auto pts = gather(mesh, cell);
  return element_mass(pts, mesh.dim, rho);
}

SparseMatrix assemble_weighted(const Mesh &mesh, const DofMap &dofs, std::span<const double> stiffness_weight,
                               std::span<const double> mass_weight)
{
  check_labels(mesh, stiffness_weight, "stiffness coefficient");
  check_labels(mesh, mass_weight, "mass coefficient");
  SparseMatrix a = pattern(mesh, dofs);
  const auto &row_ptr = a.row_ptr();
  const auto &cols = a.col_idx();
  auto &vals = a.values();
  const int nv = mesh.vertices_per_cell();
  std::vector<Point> pts(static_cast<std::size_t>(nv));
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const auto cell = mesh.cell(c);
    for (int a_ = 0; a_ < nv; ++a_)
      pts[a_] = mesh.vertices[cell[a_]];
    const int label = mesh.cell_subdomain[c];
    const double w_stiff = stiffness_weight[label - 1];
    const double w_mass = mass_weight[label - 1];
    LocalMatrix local = LocalMatrix::Zero(nv, nv);
    if (w_stiff != 0.0)
      local += element_stiffness(pts, mesh.dim, w_stiff);
    if (w_mass != 0.0)
      local += element_mass(pts, mesh.dim, w_mass);
    for (int p = 0; p < nv; ++p)
    {
      const auto i = dofs.vertex_to_dof[cell[p]];
      if (i < 0)
        continue;
      for (int q = 0; q < nv; ++q)
      {
        const auto j = dofs.vertex_to_dof[cell[q]];
        if (j < 0)
          continue;
        const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
        const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
        const auto it = std::lower_bound(first, last, j);
        vals[static_cast<std::size_t>(it - cols.begin())] += local(p, q);
      }
    }
  }
  return a;
}

SparseMatrix assemble_operator(const Mesh &mesh, const CoefficientField &omega, const CoefficientField &rho)
{
  return assemble_weighted(mesh, make_dof_map(mesh), omega.values(), rho.values());
}

SparseMatrix assemble_mass(const Mesh &mesh, const CoefficientField &tau)
{
  const Vector zero(tau.values().size(), 0.0);
  return assemble_weighted(mesh, make_dof_map(mesh), zero, tau.values());
}

SparseMatrix assemble_stiffness(const Mesh &mesh, const CoefficientField &tau)
{
  const Vector zero(tau.values().size(), 0.0);
  return assemble_weighted(mesh, make_dof_map(mesh), tau.values(), zero);
}

Vector vertex_load(const Mesh &mesh, double f_const)
{
  Vector load(mesh.num_vertices(), 0.0);
  const double share = 1.0 / mesh.vertices_per_cell();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const double part = f_const * cell_volume(mesh, c) * share;
    for (auto v : mesh.cell(c))
      load[v] += part;
  }
  return load;
}

Vector assemble_load(const Mesh &mesh, double f_const)
{
  const Vector full = vertex_load(mesh, f_const);
  Vector load;
  load.reserve(mesh.num_free());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.vertex_is_dirichlet[v])
      load.push_back(full[v]);
  return load;
}

} // namespace rdmg
