#ifndef RDMG_MULTILEVEL_HPP
#define RDMG_MULTILEVEL_HPP

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include "rdmg/assembly.hpp"
#include "rdmg/coefficients.hpp"
#include "rdmg/mesh.hpp"
#include "rdmg/sparse.hpp"

namespace rdmg
{

// Linear interpolation from the free vertices of level k-1 to those of
// level k. Coarse-vertex rows hold a single 1, midpoint rows hold 1/2 for
// each free endpoint.
SparseMatrix build_prolongation(const MeshHierarchy &hierarchy, int k);

// P^T A P
SparseMatrix galerkin_coarsen(const SparseMatrix &a_fine, const SparseMatrix &p);

struct TransferOps
{
  // prolongation[k] maps level k-1 to level k; prolongation[0] is empty.
  std::vector<SparseMatrix> prolongation;

  int finest_level() const { return static_cast<int>(prolongation.size()) - 1; }
  // Composite prolongation from level k to level `to`, applied factor by factor.
  Vector prolong(std::span<const double> x, int k, int to) const;
  // Transpose of prolong().
  Vector restrict_to(std::span<const double> r, int from, int k) const;
};

TransferOps build_transfers(const MeshHierarchy &hierarchy);

// Dense Cholesky factorisation of a small SPD operator.
class DenseCholesky
{
public:
  DenseCholesky() = default;
  explicit DenseCholesky(const SparseMatrix &a);

  std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }
  void solve(std::span<const double> b, std::span<double> x) const;

private:
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

enum class CoarseOperators
{
  galerkin,       // A_{k-1} = P_k^T A_k P_k
  rediscretized,  // assembled on each mesh
};

//
// Operators A_k and their diagonals on every level plus the exact level-0
// solver. Smoothers are derived from A_k on the fly.
//
struct LevelStack
{
  std::vector<SparseMatrix> operators;
  std::vector<Vector> diagonals;
  DenseCholesky coarse;

  int finest_level() const { return static_cast<int>(operators.size()) - 1; }
  const SparseMatrix &finest() const { return operators.back(); }
};

LevelStack build_level_stack(const MeshHierarchy &hierarchy, const TransferOps &transfers,
                             const CoefficientField &omega, const CoefficientField &rho,
                             CoarseOperators mode = CoarseOperators::galerkin);

// Stack whose finest operator is given directly (no mesh needed).
LevelStack build_level_stack(SparseMatrix finest, const TransferOps &transfers);

enum class SmootherKind
{
  jacobi,
  sgs,
};

// In-place sweeps on A x = b in natural ordering.
void forward_gauss_seidel(const SparseMatrix &a, std::span<const double> diag, std::span<const double> b,
                          std::span<double> x);
void backward_gauss_seidel(const SparseMatrix &a, std::span<const double> diag, std::span<const double> b,
                           std::span<double> x);

// jacobi: D^{-1} r. sgs: (L+D)^{-T} D (L+D)^{-1} r with A = L + D + L^T.
void smoother_apply(SmootherKind kind, const SparseMatrix &a, std::span<const double> r, std::span<double> x);
Vector smoother_apply(SmootherKind kind, const SparseMatrix &a, std::span<const double> r);

// sum_k Pbar_k S_k Pbar_k^T r with S_0 = A_0^{-1} and S_k one SGS step on A_k.
Vector bpx_apply(const LevelStack &stack, const TransferOps &transfers, std::span<const double> r);

// Smoothing step of the V-cycle.
enum class VcycleSmoother
{
  // one symmetric Gauss-Seidel sweep (forward then backward) before and after
  // the coarse correction
  symmetric,
  // one forward sweep before, one backward sweep after
  gauss_seidel,
};

std::string_view to_string(VcycleSmoother s);
VcycleSmoother parse_vcycle_smoother(std::string_view name);

// One V(1,1) cycle with an exact solve on level 0.
Vector mg_vcycle_apply(const LevelStack &stack, const TransferOps &transfers, std::span<const double> g,
                       VcycleSmoother smoother = VcycleSmoother::symmetric);

enum class PreconditionerKind
{
  identity,
  jacobi,
  sgs,
  bpx,
  mg,
  exact, // dense A^{-1}, reference only
};

std::string_view to_string(PreconditionerKind kind);
PreconditionerKind parse_preconditioner(std::string_view name);

class Preconditioner
{
public:
  virtual ~Preconditioner() = default;

  virtual PreconditionerKind kind() const = 0;
  virtual std::size_t size() const = 0;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;

  Vector operator()(std::span<const double> r) const
  {
    Vector z(size());
    apply(r, z);
    return z;
  }
};

// The stack and transfers must outlive the returned object. Applications
// allocate their own workspace, so one instance can serve several threads.
std::unique_ptr<Preconditioner> make_preconditioner(PreconditionerKind kind, const LevelStack &stack,
                                                    const TransferOps &transfers,
                                                    VcycleSmoother smoother = VcycleSmoother::symmetric);

// Single-level preconditioners need only the operator.
std::unique_ptr<Preconditioner> make_preconditioner(PreconditionerKind kind, const SparseMatrix &a);

// B = A^{-1} by dense factorisation, for small problems and tests.
std::unique_ptr<Preconditioner> make_exact_inverse(const SparseMatrix &a);

} // namespace rdmg

#endif // RDMG_MULTILEVEL_HPP
