#include "rdmg/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rdmg/error.hpp"

namespace rdmg
{

std::string_view to_string(CoefficientRole role)
{
  return role == CoefficientRole::omega ? "omega" : "rho";
}

std::string_view to_string(CoefficientCase c) { return c == CoefficientCase::c1 ? "C1" : "C2"; }

CoefficientField::CoefficientField(CoefficientRole role, std::vector<double> values)
  : role_(role), values_(std::move(values))
{
  if (values_.empty())
    fail(ErrorKind::configuration, std::string(to_string(role_)) + " needs at least one subdomain value");
  for (std::size_t m = 0; m < values_.size(); ++m)
  {
    const double v = values_[m];
    const bool ok = std::isfinite(v) && (role_ == CoefficientRole::omega ? v > 0.0 : v >= 0.0);
    if (!ok)
      fail(ErrorKind::domain, std::string(to_string(role_)) + "_" + std::to_string(m + 1) +
                                  " = " + std::to_string(v) + " is out of range");
  }
}

double jump_ratio(const CoefficientField &field)
{
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (double v : field.values())
  {
    if (v == 0.0 && field.role() == CoefficientRole::rho)
      continue;
    if (!(v > 0.0))
      fail(ErrorKind::domain, "jump ratio needs strictly positive values");
    lo = any ? std::min(lo, v) : v;
    hi = any ? std::max(hi, v) : v;
    any = true;
  }
  if (!any)
    fail(ErrorKind::domain, "jump ratio of an identically zero coefficient is undefined");
  return hi / lo;
}

CoefficientField mesh_coefficient(const CoefficientField &omega, const CoefficientField &rho, double h)
{
  if (!(h > 0.0))
    fail(ErrorKind::domain, "mesh size must be positive");
  if (omega.num_subdomains() != rho.num_subdomains())
    fail(ErrorKind::configuration, "omega and rho cover different numbers of subdomains");
  std::vector<double> values(omega.values().size());
  for (std::size_t m = 0; m < values.size(); ++m)
    values[m] = omega.values()[m] + h * h * rho.values()[m];
  return CoefficientField::omega(std::move(values));
}

std::vector<int> descending_ordering(const CoefficientField &field)
{
  std::vector<int> order(field.values().size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return field(a) > field(b); });
  return order;
}

std::vector<int> ascending_ordering(const CoefficientField &field)
{
  std::vector<int> order = descending_ordering(field);
  std::reverse(order.begin(), order.end());
  return order;
}

namespace
{

struct DisjointSets
{
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x)
  {
    while (parent[x] != x)
    {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b)
  {
    a = find(a);
    b = find(b);
    if (a != b)
      parent[std::max(a, b)] = std::min(a, b);
  }
};

} // namespace

SubdomainInfo analyze_subdomains(const Mesh &mesh, const CoefficientField &order_by)
{
  const int labels = mesh.num_subdomains();
  if (order_by.num_subdomains() < labels)
    fail(ErrorKind::configuration, "ordering coefficient does not cover every subdomain label");

  SubdomainInfo info;
  info.ordering = descending_ordering(order_by);

  const auto faces = boundary_faces(mesh);
  std::vector<std::uint8_t> label_touches(static_cast<std::size_t>(labels) + 1, 0);
  for (const BoundaryFace &f : faces)
    label_touches[mesh.cell_subdomain[f.cell]] = 1;
  for (int m = 1; m <= labels; ++m)
    if (!label_touches[m])
    {
      // Labels absent from the mesh are not subdomains at all.
      if (std::find(mesh.cell_subdomain.begin(), mesh.cell_subdomain.end(), m) != mesh.cell_subdomain.end())
        info.floating.push_back(m);
    }
  info.m0 = static_cast<int>(info.floating.size());

  // Vertex-connected pieces per label.
  DisjointSets sets(mesh.num_cells());
  const std::size_t stride = static_cast<std::size_t>(labels) + 1;
  std::vector<int> first_cell(mesh.num_vertices() * stride, -1);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const int m = mesh.cell_subdomain[c];
    for (auto v : mesh.cell(c))
    {
      int &slot = first_cell[static_cast<std::size_t>(v) * stride + m];
      if (slot < 0)
        slot = static_cast<int>(c);
      else
        sets.unite(slot, static_cast<int>(c));
    }
  }
  info.cell_component.assign(mesh.num_cells(), -1);
  std::vector<int> root_to_component(mesh.num_cells(), -1);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const int root = sets.find(static_cast<int>(c));
    if (root_to_component[root] < 0)
    {
      root_to_component[root] = static_cast<int>(info.component_label.size());
      info.component_label.push_back(mesh.cell_subdomain[c]);
      info.component_floating.push_back(1);
    }
    info.cell_component[c] = root_to_component[root];
  }
  for (const BoundaryFace &f : faces)
    info.component_floating[info.cell_component[f.cell]] = 0;
  info.floating_components =
      static_cast<int>(std::count(info.component_floating.begin(), info.component_floating.end(), 1));
  return info;
}

CoefficientCase classify(const CoefficientField &omega, const CoefficientField &rho)
{
  if (omega.num_subdomains() != rho.num_subdomains())
    fail(ErrorKind::configuration, "omega and rho cover different numbers of subdomains");
  // A common non-increasing ordering exists iff no pair is strictly
  // reversed. Zero reaction values compare as the smallest values.
  const int m = omega.num_subdomains();
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      if (omega(i) > omega(j) && rho(i) < rho(j))
        return CoefficientCase::c2;
  return CoefficientCase::c1;
}

} // namespace rdmg
