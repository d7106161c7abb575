#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rdmg/theory.hpp"

namespace rdmg
{

namespace
{

VerificationRow row(std::string name, double measured, double bound, bool passed, std::string detail)
{
  return {std::move(name), measured, bound, passed, std::move(detail)};
}

std::string join(std::span<const double> xs)
{
  std::ostringstream out;
  out.precision(4);
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << (i ? " " : "") << xs[i];
  return out.str();
}

MeshHierarchy truncate(const MeshHierarchy &h, int finest)
{
  MeshHierarchy out;
  out.gamma = h.gamma;
  out.levels.assign(h.levels.begin(), h.levels.begin() + finest + 1);
  return out;
}

} // namespace

std::vector<VerificationRow> run_verification(const VerificationOptions &options)
{
  std::vector<VerificationRow> rows;
  const auto boxes = default_inclusions();
  const MeshHierarchy cube = build_hierarchy(build_cube_mesh(options.cube_cells, boxes), options.cube_levels);
  const int top = cube.finest_level();
  const Mesh &finest = cube.finest();
  const CoefficientField unit_omega = CoefficientField::omega({1.0, 1.0});
  const CoefficientField unit_rho = CoefficientField::rho({1.0, 1.0});

  {
    double worst = 0.0;
    for (const Mesh &m : cube.levels)
      worst = std::max(worst, biorthogonality_error(m));
    rows.push_back(row("biorthogonality", worst, 1e-12, worst <= 1e-12, "max |int lambda_j mu_i - delta_ij|"));
  }

  {
    // int mu_i^2 = alpha^T M alpha must reproduce alpha_ii.
    double worst = 0.0;
    for (std::size_t c = 0; c < finest.num_cells(); ++c)
    {
      const LocalMatrix alpha = inverse_element_mass(cell_volume(finest, c), finest.dim);
      const LocalMatrix g = alpha.transpose() * element_mass(finest, c, 1.0) * alpha;
      worst = std::max(worst, ((g - alpha).cwiseAbs().maxCoeff()) / alpha.cwiseAbs().maxCoeff());
    }
    rows.push_back(row("dual basis mass", worst, 1e-12, worst <= 1e-12, "relative |int mu_i mu_j - alpha_ij|"));
  }

  const DualInterpolator natural(cube, descending_ordering(unit_omega));

  {
    double worst = 0.0;
    for (int k = 0; k < top; ++k)
    {
      const Vector vk = random_function(cube[static_cast<std::size_t>(k)], options.seed + static_cast<std::uint64_t>(k));
      const Vector back = natural.apply(k, prolong_vertices(cube, k, top, vk));
      double scale = 0.0, err = 0.0;
      for (std::size_t i = 0; i < vk.size(); ++i)
      {
        scale = std::max(scale, std::abs(vk[i]));
        err = std::max(err, std::abs(back[i] - vk[i]));
      }
      worst = std::max(worst, err / scale);
    }
    rows.push_back(row("interpolant reproduces V_k", worst, 1e-10, worst <= 1e-10, "max relative |Pi_k v_k - v_k|"));
  }

  {
    double worst_sum = 0.0, worst_rho = 0.0;
    for (int d = 0; d < options.decomposition_draws; ++d)
    {
      const Vector v = random_function(finest, options.seed + 1000 + static_cast<std::uint64_t>(d));
      const DecompositionReport rep = measure_decomposition(natural, unit_omega, unit_rho, v);
      worst_sum = std::max(worst_sum, rep.reconstruction_error);
      worst_rho = std::max(worst_rho, rep.rho_ratio());
    }
    rows.push_back(row("decomposition sums to v", worst_sum, 1e-12, worst_sum <= 1e-12, "max relative coefficient error"));
    rows.push_back(row("L2 decomposition bound", worst_rho, 50.0, worst_rho <= 50.0,
                       "max sum ||v_k||^2 / ||v||^2 with omega = rho = 1"));
  }

  const std::vector<double> jumps{1.0, 1e2, 1e4, 1e6, 1e8};
  {
    // tau = (1, 1/J): the inclusions carry the small weight.
    const CoefficientField probe = CoefficientField::rho({1.0, 0.5});
    const DualInterpolator ordered(cube, descending_ordering(probe));
    const DualInterpolator adverse(cube, ascending_ordering(probe));
    const int k = top - 1;
    Vector good, bad;
    for (double j : jumps)
    {
      const CoefficientField tau = CoefficientField::rho({1.0, 1.0 / j});
      good.push_back(interpolation_stability(ordered, k, tau, options.samples, options.seed + 7));
      bad.push_back(interpolation_stability(adverse, k, tau, options.samples, options.seed + 7));
    }
    const double spread = *std::max_element(good.begin(), good.end()) / *std::min_element(good.begin(), good.end());
    rows.push_back(row("ordered weighted L2 stability", spread, 2.0, spread < 2.0,
                       "sup ratio over J = 1..1e8: " + join(good)));
    const double growth = bad.back() / bad.front();
    double worst_scaled = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i)
      worst_scaled = std::max(worst_scaled, bad[i] * bad[i] / (jumps[i] * bad.front() * bad.front()));
    rows.push_back(row("adversarial ordering grows with J", growth, 10.0, growth >= 10.0 && worst_scaled <= 10.0,
                       "sup ratio over J = 1..1e8: " + join(bad)));
  }

  {
    const CoefficientField tau = CoefficientField::rho({1.0, 1e-4});
    const Vector v = random_function(finest, options.seed + 11);
    const Vector q = weighted_l2_project(cube, top - 1, v, tau);
    const Vector qf = prolong_vertices(cube, top - 1, top, q);
    Vector diff(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      diff[i] = v[i] - qf[i];
    const double total = weighted_l2_norm2(finest, v, tau);
    const double parts = weighted_l2_norm2(finest, qf, tau) + weighted_l2_norm2(finest, diff, tau);
    const double err = std::abs(total - parts) / total;
    rows.push_back(row("weighted projection Pythagoras", err, 1e-10, err <= 1e-10, "tau = (1, 1e-4)"));
  }

  {
    const MeshHierarchy square =
        build_hierarchy(build_square_mesh(options.square_cells, options.seed), options.square_max_level);
    const CoefficientField omega = CoefficientField::omega({1.0, 1e-6});
    const auto ordering = descending_ordering(omega);
    Vector xs, ys;
    for (int l = options.square_min_level; l <= options.square_max_level; ++l)
    {
      const MeshHierarchy sub = truncate(square, l);
      const SubdomainInfo info = analyze_subdomains(sub.finest(), omega);
      const DualInterpolator interp(sub, ordering);
      double worst = 0.0;
      for (int d = 0; d < 4; ++d)
      {
        const Vector v = project_mean_zero(
            sub.finest(), info, random_function(sub.finest(), options.seed + 100 + static_cast<std::uint64_t>(d)));
        worst = std::max(worst, measure_decomposition(interp, omega, unit_rho, v).omega_ratio());
      }
      xs.push_back(std::log(static_cast<double>(l)));
      ys.push_back(std::log(worst));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    Vector ratios;
    for (double y : ys)
      ratios.push_back(std::exp(y));
    rows.push_back(row("H1 decomposition growth in L", slope, 2.5, slope <= 2.5,
                       "log-log slope, ratios " + join(ratios)));
  }

  {
    const ScsReport flat = measure_scs(cube, unit_omega, options.scs_samples, options.seed + 3);
    const ScsReport jump = measure_scs(cube, CoefficientField::omega({1.0, 1e8}), options.scs_samples, options.seed + 3);
    rows.push_back(row("cross-level decay", flat.mean_band_ratio, 1.3, flat.mean_band_ratio >= 1.3,
                       "mean c_jk / c_j,k+1"));
    std::ostringstream detail;
    detail.precision(4);
    detail << "mean c_jk / c_j,k+1 with omega jump 1e8; decay exponent " << jump.decay_exponent << " vs "
           << flat.decay_exponent << " without";
    rows.push_back(row("cross-level decay under jumps", jump.mean_band_ratio, 1.3, jump.mean_band_ratio >= 1.3,
                       detail.str()));
  }
  return rows;
}

} // namespace rdmg
