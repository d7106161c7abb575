#ifndef RDMG_THEORY_HPP
#define RDMG_THEORY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdmg/assembly.hpp"
#include "rdmg/coefficients.hpp"
#include "rdmg/mesh.hpp"
#include "rdmg/sparse.hpp"

namespace rdmg
{

// Functions in this module are stored by vertex (Dirichlet entries zero), one
// vector per level. Free-dof vectors convert with these two helpers.
Vector to_free(const Mesh &mesh, std::span<const double> by_vertex);
Vector to_vertices(const Mesh &mesh, std::span<const double> free);

// Interpolates a level-`from` vertex vector onto level `to` >= from.
Vector prolong_vertices(const MeshHierarchy &hierarchy, int from, int to, std::span<const double> v);

// Inverse of the P1 element mass matrix:
// ((d+1)(d+2)/|T|) (I - 1 1^T / (d+2)).
LocalMatrix inverse_element_mass(double volume, int dim);

// max_ij |int_T lambda_j mu_i - delta_ij| over all cells.
double biorthogonality_error(const Mesh &mesh);

//
// Associated element of every vertex for the dual-basis interpolant: among
// the cells containing the vertex, the one whose subdomain comes first in
// `ordering` (lowest cell index on ties).
//
class DualBasisCache
{
public:
  DualBasisCache(const Mesh &mesh, std::span<const int> ordering);

  std::int32_t associated_cell(std::size_t vertex) const { return cell_[vertex]; }
  int local_index(std::size_t vertex) const { return local_[vertex]; }
  // alpha_ij of the associated element.
  LocalMatrix alpha(std::size_t vertex) const;

private:
  const Mesh *mesh_;
  std::vector<std::int32_t> cell_;
  std::vector<std::int8_t> local_;
};

//
// The maps v -> Pi_k v from finest-level functions to every level, built
// once as sparse matrices. Integrals are exact: each coarse cell is covered
// by its finest descendants, where both factors are linear.
//
class DualInterpolator
{
public:
  DualInterpolator(const MeshHierarchy &hierarchy, std::span<const int> ordering);

  const MeshHierarchy &hierarchy() const { return *hierarchy_; }
  // Level-k vertex vector of Pi_k v.
  Vector apply(int k, std::span<const double> v_finest) const;
  const SparseMatrix &matrix(int k) const;

private:
  const MeshHierarchy *hierarchy_;
  std::vector<SparseMatrix> maps_;
};

Vector dual_interpolate(const MeshHierarchy &hierarchy, int k, std::span<const double> v_finest,
                        std::span<const int> ordering);

// tau-weighted L2 projection of a finest-level function onto V_k, solved by
// CG to 1e-13. Vertices that only touch tau = 0 cells are left at zero.
Vector weighted_l2_project(const MeshHierarchy &hierarchy, int k, std::span<const double> v_finest,
                           const CoefficientField &tau);

// v^T M_tau v for a vertex vector on `mesh`.
double weighted_l2_norm2(const Mesh &mesh, std::span<const double> v, const CoefficientField &tau);
// v^T K_tau v for a vertex vector on `mesh`.
double weighted_h1_seminorm2(const Mesh &mesh, std::span<const double> v, const CoefficientField &tau);

struct DecompositionReport
{
  // pieces[k] is v_k as a level-k vertex vector.
  std::vector<Vector> pieces;
  double h1_omega_v0 = 0.0;
  // h_k^{-2} ||v_k||^2_{0,omega}, entry 0 unused.
  Vector scaled_l2_omega;
  Vector l2_rho;
  double v_h1_omega = 0.0;
  double v_l2_rho = 0.0;
  double v_energy = 0.0;
  double reconstruction_error = 0.0;

  double omega_sum() const;
  double rho_sum() const;
  double omega_ratio() const;
  double rho_ratio() const;
  double energy_ratio() const;
};

DecompositionReport measure_decomposition(const DualInterpolator &interpolator, const CoefficientField &omega,
                                          const CoefficientField &rho, std::span<const double> v_finest);
DecompositionReport measure_decomposition(const MeshHierarchy &hierarchy, const CoefficientField &omega,
                                          const CoefficientField &rho, std::span<const int> ordering,
                                          std::span<const double> v_finest);

struct ScsReport
{
  // c(j, k) for j <= k, zero below the diagonal.
  Eigen::MatrixXd c;
  // Mean of c(j, k) / c(j, k+1) over j < k.
  double mean_band_ratio = 0.0;
  // Least-squares slope of -log2 c(j, k) in k - j.
  double decay_exponent = 0.0;
};

// c_jk = max |(omega grad v_k, grad v_j)| / (h_k^{-1} ||v_k||_{0,omega} h_j^{-1} ||v_j||_{0,omega})
// over random pairs.
ScsReport measure_scs(const MeshHierarchy &hierarchy, const CoefficientField &omega, int samples = 50,
                      std::uint64_t seed = 1);

// Standard normal vertex vector with Dirichlet entries zeroed.
Vector random_function(const Mesh &mesh, std::uint64_t seed);

// Random function supported on vertices whose cells all carry `label`.
Vector random_function_in(const Mesh &mesh, int label, std::uint64_t seed);

// Rows of C^T v = 0 on the free dofs: c_m = (int_{S_m} phi_i)_i for every
// floating component S_m.
Eigen::MatrixXd floating_constraints(const Mesh &mesh, const SubdomainInfo &info);

// Subtracts multiples of the component indicator functions so that v has
// zero mean on every floating component.
Vector project_mean_zero(const Mesh &mesh, const SubdomainInfo &info, std::span<const double> v);

// sup over samples of ||Pi_k v||_{0,tau} / ||v||_{0,tau}; half of the draws
// are global, half are supported inside the subdomain of minimal tau.
double interpolation_stability(const DualInterpolator &interpolator, int k, const CoefficientField &tau,
                               int samples, std::uint64_t seed);

struct VerificationRow
{
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerificationOptions
{
  // Cube hierarchy used by most checks.
  int cube_cells = 4;
  int cube_levels = 2;
  // Randomly labelled square used for the L^2 growth regression.
  int square_cells = 6;
  int square_min_level = 2;
  int square_max_level = 5;
  int samples = 200;
  int decomposition_draws = 100;
  int scs_samples = 50;
  std::uint64_t seed = 1;
};

std::vector<VerificationRow> run_verification(const VerificationOptions &options = {});

} // namespace rdmg

#endif // RDMG_THEORY_HPP
