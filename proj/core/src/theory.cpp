#include "rdmg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/QR>

#include "rdmg/error.hpp"
#include "rdmg/krylov.hpp"
#include "rdmg/multilevel.hpp"

namespace rdmg
{

Vector to_free(const Mesh &mesh, std::span<const double> by_vertex)
{
  if (by_vertex.size() != mesh.num_vertices())
    fail(ErrorKind::size, "vertex vector length does not match the mesh");
  Vector out;
  out.reserve(mesh.num_free());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.vertex_is_dirichlet[v])
      out.push_back(by_vertex[v]);
  return out;
}

Vector to_vertices(const Mesh &mesh, std::span<const double> free)
{
  if (free.size() != mesh.num_free())
    fail(ErrorKind::size, "free vector length does not match the mesh");
  Vector out(mesh.num_vertices(), 0.0);
  std::size_t i = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.vertex_is_dirichlet[v])
      out[v] = free[i++];
  return out;
}

Vector prolong_vertices(const MeshHierarchy &hierarchy, int from, int to, std::span<const double> v)
{
  if (from < 0 || to > hierarchy.finest_level() || from > to)
    fail(ErrorKind::level, "cannot prolong from level " + std::to_string(from) + " to " + std::to_string(to));
  if (v.size() != hierarchy[static_cast<std::size_t>(from)].num_vertices())
    fail(ErrorKind::size, "vertex vector length does not match level " + std::to_string(from));
  Vector cur(v.begin(), v.end());
  for (int k = from + 1; k <= to; ++k)
  {
    const Mesh &fine = hierarchy[static_cast<std::size_t>(k)];
    Vector next(fine.num_vertices());
    for (std::size_t i = 0; i < next.size(); ++i)
    {
      const auto [a, b] = fine.vertex_parents[i];
      next[i] = 0.5 * (cur[static_cast<std::size_t>(a)] + cur[static_cast<std::size_t>(b)]);
    }
    cur.swap(next);
  }
  return cur;
}

LocalMatrix inverse_element_mass(double volume, int dim)
{
  const int n = dim + 1;
  const double scale = (dim + 1) * (dim + 2) / volume;
  LocalMatrix alpha = LocalMatrix::Constant(n, n, -scale / (dim + 2));
  alpha.diagonal().array() += scale;
  return alpha;
}

double biorthogonality_error(const Mesh &mesh)
{
  double worst = 0.0;
  const int n = mesh.vertices_per_cell();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const LocalMatrix m = element_mass(mesh, c, 1.0);
    const LocalMatrix prod = inverse_element_mass(cell_volume(mesh, c), mesh.dim) * m;
    const LocalMatrix err = prod - LocalMatrix::Identity(n, n);
    worst = std::max(worst, err.cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace
{

std::vector<int> ordering_positions(std::span<const int> ordering, int labels)
{
  std::vector<int> pos(static_cast<std::size_t>(std::max(labels, 0)) + 1, std::numeric_limits<int>::max());
  for (std::size_t i = 0; i < ordering.size(); ++i)
  {
    const int m = ordering[i];
    if (m >= 1 && m <= labels && pos[static_cast<std::size_t>(m)] == std::numeric_limits<int>::max())
      pos[static_cast<std::size_t>(m)] = static_cast<int>(i);
  }
  return pos;
}

} // namespace

DualBasisCache::DualBasisCache(const Mesh &mesh, std::span<const int> ordering) : mesh_(&mesh)
{
  const auto pos = ordering_positions(ordering, mesh.num_subdomains());
  cell_.assign(mesh.num_vertices(), -1);
  local_.assign(mesh.num_vertices(), -1);
  std::vector<int> best(mesh.num_vertices(), std::numeric_limits<int>::max());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const int key = pos[static_cast<std::size_t>(mesh.cell_subdomain[c])];
    const auto verts = mesh.cell(c);
    for (std::size_t a = 0; a < verts.size(); ++a)
    {
      const auto v = static_cast<std::size_t>(verts[a]);
      if (cell_[v] < 0 || key < best[v])
      {
        best[v] = key;
        cell_[v] = static_cast<std::int32_t>(c);
        local_[v] = static_cast<std::int8_t>(a);
      }
    }
  }
}

LocalMatrix DualBasisCache::alpha(std::size_t vertex) const
{
  const auto c = static_cast<std::size_t>(cell_[vertex]);
  return inverse_element_mass(cell_volume(*mesh_, c), mesh_->dim);
}

DualInterpolator::DualInterpolator(const MeshHierarchy &hierarchy, std::span<const int> ordering)
  : hierarchy_(&hierarchy)
{
  const int top = hierarchy.finest_level();
  const Mesh &finest = hierarchy.finest();
  const int dim = finest.dim;
  const int n = dim + 1;
  const double mass_scale = 1.0 / ((dim + 1) * (dim + 2));
  std::vector<double> fine_volume(finest.num_cells());
  for (std::size_t c = 0; c < finest.num_cells(); ++c)
    fine_volume[c] = cell_volume(finest, c);

  maps_.resize(static_cast<std::size_t>(top) + 1);
  std::vector<std::int32_t> ancestor(finest.num_cells());
  for (std::size_t c = 0; c < ancestor.size(); ++c)
    ancestor[c] = static_cast<std::int32_t>(c);

  for (int k = top; k >= 0; --k)
  {
    const Mesh &mesh = hierarchy[static_cast<std::size_t>(k)];
    if (k < top)
    {
      const Mesh &child = hierarchy[static_cast<std::size_t>(k + 1)];
      for (auto &a : ancestor)
        a = child.cell_parent[static_cast<std::size_t>(a)];
    }
    // Finest descendants grouped by level-k cell.
    std::vector<std::size_t> start(mesh.num_cells() + 1, 0);
    for (auto a : ancestor)
      ++start[static_cast<std::size_t>(a) + 1];
    for (std::size_t c = 0; c < mesh.num_cells(); ++c)
      start[c + 1] += start[c];
    std::vector<std::int32_t> members(ancestor.size());
    {
      std::vector<std::size_t> fill(start.begin(), start.end() - 1);
      for (std::size_t c = 0; c < ancestor.size(); ++c)
        members[fill[static_cast<std::size_t>(ancestor[c])]++] = static_cast<std::int32_t>(c);
    }

    const DualBasisCache cache(mesh, ordering);
    std::vector<Triplet> entries;
    std::vector<Point> corners(static_cast<std::size_t>(n));
    for (std::size_t x = 0; x < mesh.num_vertices(); ++x)
    {
      if (mesh.vertex_is_dirichlet[x])
        continue;
      const auto t = static_cast<std::size_t>(cache.associated_cell(x));
      const int i = cache.local_index(x);
      const auto verts = mesh.cell(t);
      for (int a = 0; a < n; ++a)
        corners[static_cast<std::size_t>(a)] = mesh.vertices[static_cast<std::size_t>(verts[a])];
      const auto grad = barycentric_gradients(corners, dim);
      const LocalMatrix alpha = cache.alpha(x);

      // mu_x(p) = sum_j alpha_ij lambda_j(p), lambda_j(p) = delta_j0 + grad_j . (p - P_0)
      auto mu = [&](const Point &p) {
        double s = alpha(i, 0);
        for (int j = 0; j < n; ++j)
        {
          double lin = 0.0;
          for (int r = 0; r < dim; ++r)
            lin += grad(j, r) * (p[static_cast<std::size_t>(r)] - corners[0][static_cast<std::size_t>(r)]);
          s += alpha(i, j) * lin;
        }
        return s;
      };

      for (std::size_t m = start[t]; m < start[t + 1]; ++m)
      {
        const auto c = static_cast<std::size_t>(members[m]);
        const auto fv = finest.cell(c);
        double values[4];
        double sum = 0.0;
        for (int b = 0; b < n; ++b)
        {
          values[b] = mu(finest.vertices[static_cast<std::size_t>(fv[b])]);
          sum += values[b];
        }
        const double w = fine_volume[c] * mass_scale;
        for (int a = 0; a < n; ++a)
          entries.push_back({static_cast<std::int32_t>(x), fv[a], w * (sum + values[a])});
      }
    }
    maps_[static_cast<std::size_t>(k)] =
        SparseMatrix::from_triplets(mesh.num_vertices(), finest.num_vertices(), entries);
  }
}

const SparseMatrix &DualInterpolator::matrix(int k) const
{
  if (k < 0 || k >= static_cast<int>(maps_.size()))
    fail(ErrorKind::level, "interpolation level " + std::to_string(k) + " outside 0.." +
                               std::to_string(static_cast<int>(maps_.size()) - 1));
  return maps_[static_cast<std::size_t>(k)];
}

Vector DualInterpolator::apply(int k, std::span<const double> v_finest) const
{
  const SparseMatrix &m = matrix(k);
  if (v_finest.size() != m.cols())
    fail(ErrorKind::size, "function is not a finest-level vertex vector");
  return m * v_finest;
}

Vector dual_interpolate(const MeshHierarchy &hierarchy, int k, std::span<const double> v_finest,
                        std::span<const int> ordering)
{
  if (k < 0 || k > hierarchy.finest_level())
    fail(ErrorKind::level, "interpolation level " + std::to_string(k) + " outside 0.." +
                               std::to_string(hierarchy.finest_level()));
  return DualInterpolator(hierarchy, ordering).apply(k, v_finest);
}

double weighted_l2_norm2(const Mesh &mesh, std::span<const double> v, const CoefficientField &tau)
{
  const Vector f = to_free(mesh, v);
  const SparseMatrix m = assemble_mass(mesh, tau);
  return dot(f, m * f);
}

double weighted_h1_seminorm2(const Mesh &mesh, std::span<const double> v, const CoefficientField &tau)
{
  const Vector f = to_free(mesh, v);
  const SparseMatrix k = assemble_stiffness(mesh, tau);
  return dot(f, k * f);
}

Vector weighted_l2_project(const MeshHierarchy &hierarchy, int k, std::span<const double> v_finest,
                           const CoefficientField &tau)
{
  const int top = hierarchy.finest_level();
  if (k < 0 || k > top)
    fail(ErrorKind::level, "projection level " + std::to_string(k) + " outside 0.." + std::to_string(top));
  if (std::all_of(tau.values().begin(), tau.values().end(), [](double t) { return t == 0.0; }))
    fail(ErrorKind::domain, "weighted mass matrix is singular (tau vanishes everywhere)");

  const Mesh &finest = hierarchy.finest();
  Vector rhs = assemble_mass(finest, tau) * to_free(finest, v_finest);
  for (int j = top; j > k; --j)
  {
    const SparseMatrix p = build_prolongation(hierarchy, j);
    Vector next(p.cols());
    p.multiply_transpose(rhs, next);
    rhs.swap(next);
  }

  const Mesh &mesh = hierarchy[static_cast<std::size_t>(k)];
  SparseMatrix m = assemble_mass(mesh, tau);
  const Vector diag = m.diagonal();
  std::vector<Triplet> pad;
  for (std::size_t i = 0; i < diag.size(); ++i)
    if (diag[i] == 0.0)
      pad.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(i), 1.0});
  if (!pad.empty())
  {
    std::vector<Triplet> all;
    all.reserve(m.nnz() + pad.size());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p)
        all.push_back({static_cast<std::int32_t>(i), m.col_idx()[p], m.values()[p]});
    all.insert(all.end(), pad.begin(), pad.end());
    m = SparseMatrix::from_triplets(m.rows(), m.cols(), all);
  }
  const auto jacobi = make_preconditioner(PreconditionerKind::jacobi, m);
  SolveOptions opts;
  opts.tol = 1e-13;
  opts.max_iter = 10000;
  const SolveReport report = pcg(m, *jacobi, rhs, opts);
  return to_vertices(mesh, report.solution);
}

double DecompositionReport::omega_sum() const
{
  double s = h1_omega_v0;
  for (std::size_t k = 1; k < scaled_l2_omega.size(); ++k)
    s += scaled_l2_omega[k];
  return s;
}

double DecompositionReport::rho_sum() const
{
  double s = 0.0;
  for (double x : l2_rho)
    s += x;
  return s;
}

namespace
{

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

} // namespace

double DecompositionReport::omega_ratio() const { return safe_ratio(omega_sum(), v_h1_omega); }
double DecompositionReport::rho_ratio() const { return safe_ratio(rho_sum(), v_l2_rho); }
double DecompositionReport::energy_ratio() const { return safe_ratio(omega_sum() + rho_sum(), v_energy); }

DecompositionReport measure_decomposition(const DualInterpolator &interpolator, const CoefficientField &omega,
                                          const CoefficientField &rho, std::span<const double> v_finest)
{
  const MeshHierarchy &hierarchy = interpolator.hierarchy();
  const int top = hierarchy.finest_level();
  DecompositionReport report;
  report.pieces.resize(static_cast<std::size_t>(top) + 1);
  report.scaled_l2_omega.assign(static_cast<std::size_t>(top) + 1, 0.0);
  report.l2_rho.assign(static_cast<std::size_t>(top) + 1, 0.0);

  Vector previous;
  Vector sum(hierarchy.finest().num_vertices(), 0.0);
  for (int k = 0; k <= top; ++k)
  {
    const auto ku = static_cast<std::size_t>(k);
    const Mesh &mesh = hierarchy[ku];
    Vector current = interpolator.apply(k, v_finest);
    Vector piece = current;
    if (k > 0)
    {
      const Vector up = prolong_vertices(hierarchy, k - 1, k, previous);
      for (std::size_t i = 0; i < piece.size(); ++i)
        piece[i] -= up[i];
    }
    if (k == 0)
      report.h1_omega_v0 = weighted_h1_seminorm2(mesh, piece, omega);
    else
      report.scaled_l2_omega[ku] = weighted_l2_norm2(mesh, piece, omega) / (mesh.h * mesh.h);
    report.l2_rho[ku] = weighted_l2_norm2(mesh, piece, rho);
    axpy(1.0, prolong_vertices(hierarchy, k, top, piece), sum);
    report.pieces[ku] = std::move(piece);
    previous = std::move(current);
  }

  const Mesh &finest = hierarchy.finest();
  double scale = 0.0;
  for (std::size_t i = 0; i < sum.size(); ++i)
  {
    report.reconstruction_error = std::max(report.reconstruction_error, std::abs(sum[i] - v_finest[i]));
    scale = std::max(scale, std::abs(v_finest[i]));
  }
  if (scale > 0.0)
    report.reconstruction_error /= scale;
  report.v_h1_omega = weighted_h1_seminorm2(finest, v_finest, omega);
  report.v_l2_rho = weighted_l2_norm2(finest, v_finest, rho);
  report.v_energy = report.v_h1_omega + report.v_l2_rho;
  return report;
}

DecompositionReport measure_decomposition(const MeshHierarchy &hierarchy, const CoefficientField &omega,
                                          const CoefficientField &rho, std::span<const int> ordering,
                                          std::span<const double> v_finest)
{
  return measure_decomposition(DualInterpolator(hierarchy, ordering), omega, rho, v_finest);
}

ScsReport measure_scs(const MeshHierarchy &hierarchy, const CoefficientField &omega, int samples,
                      std::uint64_t seed)
{
  const int top = hierarchy.finest_level();
  if (top < 2)
    fail(ErrorKind::level, "strengthened Cauchy-Schwarz needs at least three levels");
  const TransferOps transfers = build_transfers(hierarchy);
  std::vector<SparseMatrix> stiff, mass;
  for (int k = 0; k <= top; ++k)
  {
    stiff.push_back(assemble_stiffness(hierarchy[static_cast<std::size_t>(k)], omega));
    mass.push_back(assemble_mass(hierarchy[static_cast<std::size_t>(k)], omega));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto draw = [&](std::size_t n) {
    Vector v(n);
    for (double &x : v)
      x = normal(rng);
    return v;
  };

  ScsReport report;
  const auto levels = static_cast<Eigen::Index>(top) + 1;
  report.c = Eigen::MatrixXd::Zero(levels, levels);
  for (int j = 0; j <= top; ++j)
    for (int k = j; k <= top; ++k)
    {
      const auto ju = static_cast<std::size_t>(j);
      const auto ku = static_cast<std::size_t>(k);
      const double hj = hierarchy[ju].h, hk = hierarchy[ku].h;
      double best = 0.0;
      for (int s = 0; s < samples; ++s)
      {
        const Vector vj = draw(mass[ju].rows());
        const Vector vk = draw(mass[ku].rows());
        const Vector up = transfers.prolong(vj, j, k);
        const double num = std::abs(dot(up, stiff[ku] * vk));
        const double den = std::sqrt(dot(vk, mass[ku] * vk)) / hk * std::sqrt(dot(vj, mass[ju] * vj)) / hj;
        if (den > 0.0)
          best = std::max(best, num / den);
      }
      report.c(j, k) = best;
    }

  double ratio_sum = 0.0, sxy = 0.0, sxx = 0.0;
  int ratio_count = 0;
  for (int j = 0; j <= top; ++j)
    for (int k = j; k <= top; ++k)
    {
      if (k > j && k < top && report.c(j, k + 1) > 0.0)
      {
        ratio_sum += report.c(j, k) / report.c(j, k + 1);
        ++ratio_count;
      }
      if (k > j && report.c(j, k) > 0.0 && report.c(j, j) > 0.0)
      {
        const double x = k - j;
        sxy += x * -std::log2(report.c(j, k) / report.c(j, j));
        sxx += x * x;
      }
    }
  report.mean_band_ratio = ratio_count > 0 ? ratio_sum / ratio_count : 0.0;
  report.decay_exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  return report;
}

Vector random_function(const Mesh &mesh, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(mesh.num_vertices());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    const double x = normal(rng);
    v[i] = mesh.vertex_is_dirichlet[i] ? 0.0 : x;
  }
  return v;
}

Vector random_function_in(const Mesh &mesh, int label, std::uint64_t seed)
{
  std::vector<std::uint8_t> inside(mesh.num_vertices(), 0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    if (mesh.cell_subdomain[c] == label)
      for (auto v : mesh.cell(c))
        inside[static_cast<std::size_t>(v)] = 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    if (mesh.cell_subdomain[c] != label)
      for (auto v : mesh.cell(c))
        inside[static_cast<std::size_t>(v)] = 0;
  Vector v = random_function(mesh, seed);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!inside[i])
      v[i] = 0.0;
  return v;
}

namespace
{

std::vector<int> floating_index(const SubdomainInfo &info)
{
  std::vector<int> index(info.component_floating.size(), -1);
  int next = 0;
  for (std::size_t c = 0; c < index.size(); ++c)
    if (info.component_floating[c])
      index[c] = next++;
  return index;
}

} // namespace

Eigen::MatrixXd floating_constraints(const Mesh &mesh, const SubdomainInfo &info)
{
  if (info.cell_component.size() != mesh.num_cells())
    fail(ErrorKind::structure, "subdomain analysis belongs to a different mesh");
  const DofMap dofs = make_dof_map(mesh);
  const auto index = floating_index(info);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dofs.size()), info.floating_components);
  const double share = 1.0 / mesh.vertices_per_cell();
  for (std::size_t cell = 0; cell < mesh.num_cells(); ++cell)
  {
    const int col = index[static_cast<std::size_t>(info.cell_component[cell])];
    if (col < 0)
      continue;
    const double w = cell_volume(mesh, cell) * share;
    for (auto v : mesh.cell(cell))
      if (const auto i = dofs.vertex_to_dof[static_cast<std::size_t>(v)]; i >= 0)
        c(i, col) += w;
  }
  return c;
}

Vector project_mean_zero(const Mesh &mesh, const SubdomainInfo &info, std::span<const double> v)
{
  if (v.size() != mesh.num_vertices())
    fail(ErrorKind::size, "vertex vector length does not match the mesh");
  const int m = info.floating_components;
  Vector out(v.begin(), v.end());
  if (m == 0)
    return out;
  const Eigen::MatrixXd c = floating_constraints(mesh, info);
  const DofMap dofs = make_dof_map(mesh);
  const auto index = floating_index(info);

  // Indicator of each floating component on its free vertices.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dofs.size()), m);
  for (std::size_t cell = 0; cell < mesh.num_cells(); ++cell)
  {
    const int col = index[static_cast<std::size_t>(info.cell_component[cell])];
    if (col < 0)
      continue;
    for (auto vtx : mesh.cell(cell))
      if (const auto i = dofs.vertex_to_dof[static_cast<std::size_t>(vtx)]; i >= 0)
        w(i, col) = 1.0;
  }
  const Vector f = to_free(mesh, v);
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::MatrixXd g = c.transpose() * w;
  const Eigen::VectorXd t = g.colPivHouseholderQr().solve(c.transpose() * fv);
  const Eigen::VectorXd corrected = fv - w * t;
  return to_vertices(mesh, std::span<const double>(corrected.data(), static_cast<std::size_t>(corrected.size())));
}

double interpolation_stability(const DualInterpolator &interpolator, int k, const CoefficientField &tau,
                               int samples, std::uint64_t seed)
{
  const MeshHierarchy &hierarchy = interpolator.hierarchy();
  const Mesh &finest = hierarchy.finest();
  const Mesh &coarse = hierarchy[static_cast<std::size_t>(k)];
  const SparseMatrix m_fine = assemble_mass(finest, tau);
  const SparseMatrix m_coarse = assemble_mass(coarse, tau);
  const int min_label = ascending_ordering(tau).front();

  double best = 0.0;
  for (int s = 0; s < samples; ++s)
  {
    const std::uint64_t draw_seed = seed + static_cast<std::uint64_t>(s);
    const Vector v = s % 2 == 0 ? random_function(finest, draw_seed) : random_function_in(finest, min_label, draw_seed);
    const Vector vf = to_free(finest, v);
    const double den = dot(vf, m_fine * vf);
    if (!(den > 0.0))
      continue;
    const Vector pf = to_free(coarse, interpolator.apply(k, v));
    best = std::max(best, std::sqrt(dot(pf, m_coarse * pf) / den));
  }
  return best;
}

} // namespace rdmg
