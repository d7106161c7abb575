#include "rdmg/multilevel.hpp"

#include <algorithm>
#include <string>

#include "rdmg/error.hpp"

namespace rdmg
{

SparseMatrix build_prolongation(const MeshHierarchy &hierarchy, int k)
{
  if (k < 1 || k > hierarchy.finest_level())
    fail(ErrorKind::level, "prolongation index " + std::to_string(k) + " outside 1.." +
                               std::to_string(hierarchy.finest_level()));
  const Mesh &coarse = hierarchy[static_cast<std::size_t>(k - 1)];
  const Mesh &fine = hierarchy[static_cast<std::size_t>(k)];
  if (fine.vertex_parents.size() != fine.num_vertices() || fine.num_vertices() < coarse.num_vertices())
    fail(ErrorKind::structure, "level " + std::to_string(k) + " is not a refinement of level " +
                                   std::to_string(k - 1));
  for (std::size_t v = 0; v < coarse.num_vertices(); ++v)
    if (fine.vertices[v] != coarse.vertices[v] || fine.vertex_parents[v][0] != static_cast<std::int32_t>(v))
      fail(ErrorKind::structure, "coarse vertices are not a prefix of the fine vertex set");

  const DofMap coarse_dofs = make_dof_map(coarse);
  const DofMap fine_dofs = make_dof_map(fine);
  std::vector<Triplet> entries;
  entries.reserve(fine_dofs.size() * 2);
  for (std::size_t i = 0; i < fine_dofs.size(); ++i)
  {
    const auto v = fine_dofs.dof_to_vertex[i];
    const auto [a, b] = fine.vertex_parents[static_cast<std::size_t>(v)];
    const auto row = static_cast<std::int32_t>(i);
    if (a == b)
    {
      const auto j = coarse_dofs.vertex_to_dof[static_cast<std::size_t>(a)];
      if (j < 0)
        fail(ErrorKind::structure, "free fine vertex sits on a Dirichlet coarse vertex");
      entries.push_back({row, j, 1.0});
      continue;
    }
    for (auto p : {a, b})
      if (const auto j = coarse_dofs.vertex_to_dof[static_cast<std::size_t>(p)]; j >= 0)
        entries.push_back({row, j, 0.5});
  }
  return SparseMatrix::from_triplets(fine_dofs.size(), coarse_dofs.size(), entries);
}

SparseMatrix galerkin_coarsen(const SparseMatrix &a_fine, const SparseMatrix &p)
{
  if (a_fine.cols() != p.rows() || a_fine.rows() != p.rows())
    fail(ErrorKind::structure, "prolongation does not match the fine operator");
  return multiply(p.transpose(), multiply(a_fine, p));
}

Vector TransferOps::prolong(std::span<const double> x, int k, int to) const
{
  Vector cur(x.begin(), x.end());
  for (int j = k + 1; j <= to; ++j)
  {
    Vector next(prolongation[static_cast<std::size_t>(j)].rows());
    prolongation[static_cast<std::size_t>(j)].multiply(cur, next);
    cur.swap(next);
  }
  return cur;
}

Vector TransferOps::restrict_to(std::span<const double> r, int from, int k) const
{
  Vector cur(r.begin(), r.end());
  for (int j = from; j > k; --j)
  {
    Vector next(prolongation[static_cast<std::size_t>(j)].cols());
    prolongation[static_cast<std::size_t>(j)].multiply_transpose(cur, next);
    cur.swap(next);
  }
  return cur;
}

TransferOps build_transfers(const MeshHierarchy &hierarchy)
{
  TransferOps ops;
  ops.prolongation.resize(static_cast<std::size_t>(hierarchy.finest_level()) + 1);
  for (int k = 1; k <= hierarchy.finest_level(); ++k)
    ops.prolongation[static_cast<std::size_t>(k)] = build_prolongation(hierarchy, k);
  return ops;
}

DenseCholesky::DenseCholesky(const SparseMatrix &a)
{
  if (a.rows() != a.cols())
    fail(ErrorKind::coarse_solve, "coarse operator is not square");
  factor_.compute(a.to_dense());
  if (factor_.info() != Eigen::Success)
    fail(ErrorKind::coarse_solve, "coarse operator is not positive definite");
}

void DenseCholesky::solve(std::span<const double> b, std::span<double> x) const
{
  const Eigen::Index n = factor_.rows();
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::Map<Eigen::VectorXd> out(x.data(), n);
  out = factor_.solve(rhs);
}

namespace
{

LevelStack finish_stack(std::vector<SparseMatrix> operators)
{
  LevelStack stack;
  stack.operators = std::move(operators);
  for (const SparseMatrix &a : stack.operators)
  {
    Vector d = a.diagonal();
    for (double x : d)
      if (!(x > 0.0))
        fail(ErrorKind::definiteness, "operator has a non-positive diagonal entry");
    stack.diagonals.push_back(std::move(d));
  }
  stack.coarse = DenseCholesky(stack.operators.front());
  return stack;
}

} // namespace

LevelStack build_level_stack(const MeshHierarchy &hierarchy, const TransferOps &transfers,
                             const CoefficientField &omega, const CoefficientField &rho, CoarseOperators mode)
{
  if (transfers.finest_level() != hierarchy.finest_level())
    fail(ErrorKind::structure, "transfer operators do not match the hierarchy depth");
  const auto levels = static_cast<std::size_t>(hierarchy.finest_level()) + 1;
  std::vector<SparseMatrix> ops(levels);
  if (mode == CoarseOperators::rediscretized)
  {
    for (std::size_t k = 0; k < levels; ++k)
      ops[k] = assemble_operator(hierarchy[k], omega, rho);
    return finish_stack(std::move(ops));
  }
  ops.back() = assemble_operator(hierarchy.finest(), omega, rho);
  return build_level_stack(std::move(ops.back()), transfers);
}

LevelStack build_level_stack(SparseMatrix finest, const TransferOps &transfers)
{
  const auto levels = static_cast<std::size_t>(transfers.finest_level()) + 1;
  std::vector<SparseMatrix> ops(levels);
  ops.back() = std::move(finest);
  for (std::size_t k = levels - 1; k > 0; --k)
    ops[k - 1] = galerkin_coarsen(ops[k], transfers.prolongation[k]);
  return finish_stack(std::move(ops));
}

void forward_gauss_seidel(const SparseMatrix &a, std::span<const double> diag, std::span<const double> b,
                          std::span<double> x)
{
  const auto &rp = a.row_ptr();
  const auto &ci = a.col_idx();
  const auto &va = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i)
  {
    double s = b[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      s -= va[k] * x[ci[k]];
    x[i] += s / diag[i];
  }
}

void backward_gauss_seidel(const SparseMatrix &a, std::span<const double> diag, std::span<const double> b,
                           std::span<double> x)
{
  const auto &rp = a.row_ptr();
  const auto &ci = a.col_idx();
  const auto &va = a.values();
  for (std::size_t i = a.rows(); i-- > 0;)
  {
    double s = b[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      s -= va[k] * x[ci[k]];
    x[i] += s / diag[i];
  }
}

namespace
{

void sgs_with_diag(const SparseMatrix &a, std::span<const double> diag, std::span<const double> r,
                   std::span<double> x)
{
  std::fill(x.begin(), x.end(), 0.0);
  forward_gauss_seidel(a, diag, r, x);
  backward_gauss_seidel(a, diag, r, x);
}

Vector checked_diagonal(const SparseMatrix &a)
{
  Vector d = a.diagonal();
  for (double x : d)
    if (!(x > 0.0))
      fail(ErrorKind::definiteness, "smoother needs a positive diagonal");
  return d;
}

} // namespace

void smoother_apply(SmootherKind kind, const SparseMatrix &a, std::span<const double> r, std::span<double> x)
{
  const Vector diag = checked_diagonal(a);
  if (kind == SmootherKind::jacobi)
  {
    for (std::size_t i = 0; i < diag.size(); ++i)
      x[i] = r[i] / diag[i];
    return;
  }
  sgs_with_diag(a, diag, r, x);
}

Vector smoother_apply(SmootherKind kind, const SparseMatrix &a, std::span<const double> r)
{
  Vector x(a.rows());
  smoother_apply(kind, a, r, x);
  return x;
}

namespace
{

void check_stack(const LevelStack &stack, const TransferOps &transfers, std::size_t n)
{
  if (stack.finest_level() != transfers.finest_level())
    fail(ErrorKind::structure, "level stack and transfer operators differ in depth");
  if (n != stack.finest().rows())
    fail(ErrorKind::structure, "vector length does not match the finest operator");
}

void vcycle(const LevelStack &stack, const TransferOps &transfers, VcycleSmoother smoother, int k,
            std::span<const double> g, std::span<double> x)
{
  if (k == 0)
  {
    stack.coarse.solve(g, x);
    return;
  }
  const auto ku = static_cast<std::size_t>(k);
  const SparseMatrix &a = stack.operators[ku];
  const SparseMatrix &p = transfers.prolongation[ku];
  const Vector &diag = stack.diagonals[ku];

  std::fill(x.begin(), x.end(), 0.0);
  forward_gauss_seidel(a, diag, g, x);
  if (smoother == VcycleSmoother::symmetric)
    backward_gauss_seidel(a, diag, g, x);

  Vector r(a.rows());
  a.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = g[i] - r[i];
  Vector rc(p.cols()), xc(p.cols());
  p.multiply_transpose(r, rc);
  vcycle(stack, transfers, smoother, k - 1, rc, xc);
  Vector corr(p.rows());
  p.multiply(xc, corr);
  axpy(1.0, corr, x);

  if (smoother == VcycleSmoother::symmetric)
    forward_gauss_seidel(a, diag, g, x);
  backward_gauss_seidel(a, diag, g, x);
}

} // namespace

Vector bpx_apply(const LevelStack &stack, const TransferOps &transfers, std::span<const double> r)
{
  check_stack(stack, transfers, r.size());
  const int top = stack.finest_level();
  std::vector<Vector> residuals(static_cast<std::size_t>(top) + 1);
  residuals.back().assign(r.begin(), r.end());
  for (int k = top; k > 0; --k)
  {
    const SparseMatrix &p = transfers.prolongation[static_cast<std::size_t>(k)];
    residuals[static_cast<std::size_t>(k - 1)].resize(p.cols());
    p.multiply_transpose(residuals[static_cast<std::size_t>(k)], residuals[static_cast<std::size_t>(k - 1)]);
  }
  Vector x(residuals[0].size());
  stack.coarse.solve(residuals[0], x);
  for (int k = 1; k <= top; ++k)
  {
    const auto ku = static_cast<std::size_t>(k);
    Vector next(transfers.prolongation[ku].rows());
    transfers.prolongation[ku].multiply(x, next);
    Vector s(next.size());
    sgs_with_diag(stack.operators[ku], stack.diagonals[ku], residuals[ku], s);
    axpy(1.0, s, next);
    x.swap(next);
  }
  return x;
}

Vector mg_vcycle_apply(const LevelStack &stack, const TransferOps &transfers, std::span<const double> g,
                       VcycleSmoother smoother)
{
  check_stack(stack, transfers, g.size());
  Vector x(g.size());
  vcycle(stack, transfers, smoother, stack.finest_level(), g, x);
  return x;
}

std::string_view to_string(VcycleSmoother s)
{
  return s == VcycleSmoother::symmetric ? "sgs" : "gs";
}

VcycleSmoother parse_vcycle_smoother(std::string_view name)
{
  if (name == "sgs" || name == "symmetric")
    return VcycleSmoother::symmetric;
  if (name == "gs" || name == "gauss-seidel")
    return VcycleSmoother::gauss_seidel;
  fail(ErrorKind::configuration, "unknown V-cycle smoother '" + std::string(name) + "'");
}

std::string_view to_string(PreconditionerKind kind)
{
  switch (kind)
  {
  case PreconditionerKind::identity: return "none";
  case PreconditionerKind::jacobi: return "jacobi";
  case PreconditionerKind::sgs: return "sgs";
  case PreconditionerKind::bpx: return "bpx";
  case PreconditionerKind::mg: return "mg";
  case PreconditionerKind::exact: return "exact";
  }
  return "?";
}

PreconditionerKind parse_preconditioner(std::string_view name)
{
  if (name == "none" || name == "identity")
    return PreconditionerKind::identity;
  if (name == "jacobi")
    return PreconditionerKind::jacobi;
  if (name == "sgs" || name == "gs")
    return PreconditionerKind::sgs;
  if (name == "bpx")
    return PreconditionerKind::bpx;
  if (name == "mg")
    return PreconditionerKind::mg;
  fail(ErrorKind::configuration, "unknown preconditioner '" + std::string(name) + "'");
}

namespace
{

class IdentityPreconditioner final : public Preconditioner
{
public:
  explicit IdentityPreconditioner(std::size_t n) : n_(n) {}
  PreconditionerKind kind() const override { return PreconditionerKind::identity; }
  std::size_t size() const override { return n_; }
  void apply(std::span<const double> r, std::span<double> z) const override
  {
    std::copy(r.begin(), r.end(), z.begin());
  }

private:
  std::size_t n_;
};

class JacobiPreconditioner final : public Preconditioner
{
public:
  explicit JacobiPreconditioner(const SparseMatrix &a) : inv_diag_(checked_diagonal(a))
  {
    for (double &d : inv_diag_)
      d = 1.0 / d;
  }
  PreconditionerKind kind() const override { return PreconditionerKind::jacobi; }
  std::size_t size() const override { return inv_diag_.size(); }
  void apply(std::span<const double> r, std::span<double> z) const override
  {
    for (std::size_t i = 0; i < inv_diag_.size(); ++i)
      z[i] = inv_diag_[i] * r[i];
  }

private:
  Vector inv_diag_;
};

class SgsPreconditioner final : public Preconditioner
{
public:
  explicit SgsPreconditioner(const SparseMatrix &a) : a_(a), diag_(checked_diagonal(a)) {}
  PreconditionerKind kind() const override { return PreconditionerKind::sgs; }
  std::size_t size() const override { return diag_.size(); }
  void apply(std::span<const double> r, std::span<double> z) const override { sgs_with_diag(a_, diag_, r, z); }

private:
  const SparseMatrix &a_;
  Vector diag_;
};

class BpxPreconditioner final : public Preconditioner
{
public:
  BpxPreconditioner(const LevelStack &stack, const TransferOps &transfers) : stack_(stack), transfers_(transfers)
  {
    check_stack(stack, transfers, stack.finest().rows());
  }
  PreconditionerKind kind() const override { return PreconditionerKind::bpx; }
  std::size_t size() const override { return stack_.finest().rows(); }
  void apply(std::span<const double> r, std::span<double> z) const override
  {
    const Vector x = bpx_apply(stack_, transfers_, r);
    std::copy(x.begin(), x.end(), z.begin());
  }

private:
  const LevelStack &stack_;
  const TransferOps &transfers_;
};

class MultigridPreconditioner final : public Preconditioner
{
public:
  MultigridPreconditioner(const LevelStack &stack, const TransferOps &transfers, VcycleSmoother smoother)
    : stack_(stack), transfers_(transfers), smoother_(smoother)
  {
    check_stack(stack, transfers, stack.finest().rows());
  }
  PreconditionerKind kind() const override { return PreconditionerKind::mg; }
  std::size_t size() const override { return stack_.finest().rows(); }
  void apply(std::span<const double> g, std::span<double> x) const override
  {
    vcycle(stack_, transfers_, smoother_, stack_.finest_level(), g, x);
  }

private:
  const LevelStack &stack_;
  const TransferOps &transfers_;
  VcycleSmoother smoother_;
};

class ExactInverse final : public Preconditioner
{
public:
  explicit ExactInverse(const SparseMatrix &a) : solver_(a) {}
  PreconditionerKind kind() const override { return PreconditionerKind::exact; }
  std::size_t size() const override { return solver_.size(); }
  void apply(std::span<const double> r, std::span<double> z) const override { solver_.solve(r, z); }

private:
  DenseCholesky solver_;
};

} // namespace

std::unique_ptr<Preconditioner> make_preconditioner(PreconditionerKind kind, const LevelStack &stack,
                                                    const TransferOps &transfers, VcycleSmoother smoother)
{
  switch (kind)
  {
  case PreconditionerKind::bpx: return std::make_unique<BpxPreconditioner>(stack, transfers);
  case PreconditionerKind::mg: return std::make_unique<MultigridPreconditioner>(stack, transfers, smoother);
  default: return make_preconditioner(kind, stack.finest());
  }
}

std::unique_ptr<Preconditioner> make_preconditioner(PreconditionerKind kind, const SparseMatrix &a)
{
  switch (kind)
  {
  case PreconditionerKind::identity: return std::make_unique<IdentityPreconditioner>(a.rows());
  case PreconditionerKind::jacobi: return std::make_unique<JacobiPreconditioner>(a);
  case PreconditionerKind::sgs: return std::make_unique<SgsPreconditioner>(a);
  case PreconditionerKind::exact: return std::make_unique<ExactInverse>(a);
  case PreconditionerKind::bpx:
  case PreconditionerKind::mg: break;
  }
  fail(ErrorKind::configuration, std::string(to_string(kind)) + " needs a level stack");
}

std::unique_ptr<Preconditioner> make_exact_inverse(const SparseMatrix &a) { return std::make_unique<ExactInverse>(a); }

} // namespace rdmg
