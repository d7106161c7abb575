#ifndef RDMG_ASSEMBLY_HPP
#define RDMG_ASSEMBLY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rdmg/coefficients.hpp"
#include "rdmg/mesh.hpp"
#include "rdmg/sparse.hpp"

namespace rdmg
{

// Numbering of the free (non-Dirichlet) vertices in ascending vertex order.
struct DofMap
{
  std::vector<std::int32_t> vertex_to_dof; // -1 on Dirichlet vertices
  std::vector<std::int32_t> dof_to_vertex;

  std::size_t size() const { return dof_to_vertex.size(); }
};

DofMap make_dof_map(const Mesh &mesh);

using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

// Rows are the constant gradients of the barycentric coordinates.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 3> barycentric_gradients(std::span<const Point> simplex,
                                                                                   int dim);

// omega |T| grad(lambda_i) . grad(lambda_j)
LocalMatrix element_stiffness(std::span<const Point> simplex, int dim, double omega);
// rho |T| (1 + delta_ij) / ((d+1)(d+2))
LocalMatrix element_mass(std::span<const Point> simplex, int dim, double rho);

LocalMatrix element_stiffness(const Mesh &mesh, std::size_t cell, double omega);
LocalMatrix element_mass(const Mesh &mesh, std::size_t cell, double rho);

// Reduced operator of a(u,v) = sum_m omega_m (grad u, grad v)_m + rho_m (u, v)_m
// on the free vertices. Cells are visited in ascending order.
SparseMatrix assemble_operator(const Mesh &mesh, const CoefficientField &omega, const CoefficientField &rho);

// Same, with arbitrary non-negative per-label weights for the two terms.
SparseMatrix assemble_weighted(const Mesh &mesh, const DofMap &dofs, std::span<const double> stiffness_weight,
                               std::span<const double> mass_weight);

// Weighted mass matrix (v, w)_{0,tau} on the free vertices.
SparseMatrix assemble_mass(const Mesh &mesh, const CoefficientField &tau);
// Weighted stiffness matrix (tau grad v, grad w) on the free vertices.
SparseMatrix assemble_stiffness(const Mesh &mesh, const CoefficientField &tau);

// Load of a constant source for every vertex, Dirichlet vertices included.
Vector vertex_load(const Mesh &mesh, double f_const);
// Load restricted to the free vertices.
Vector assemble_load(const Mesh &mesh, double f_const);

} // namespace rdmg

#endif // RDMG_ASSEMBLY_HPP
