#ifndef RDMG_COEFFICIENTS_HPP
#define RDMG_COEFFICIENTS_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "rdmg/mesh.hpp"

namespace rdmg
{

enum class CoefficientRole
{
  omega, // diffusion, strictly positive
  rho,   // reaction, non-negative
};

std::string_view to_string(CoefficientRole role);

//
// Piecewise-constant coefficient: one value per subdomain label, label m
// stored at values()[m - 1].
//
class CoefficientField
{
public:
  CoefficientField(CoefficientRole role, std::vector<double> values);

  static CoefficientField omega(std::vector<double> values)
  {
    return {CoefficientRole::omega, std::move(values)};
  }
  static CoefficientField rho(std::vector<double> values)
  {
    return {CoefficientRole::rho, std::move(values)};
  }

  CoefficientRole role() const { return role_; }
  const std::vector<double> &values() const { return values_; }
  int num_subdomains() const { return static_cast<int>(values_.size()); }
  double operator()(int subdomain) const { return values_[static_cast<std::size_t>(subdomain - 1)]; }

  bool operator==(const CoefficientField &) const = default;

private:
  CoefficientRole role_;
  std::vector<double> values_;
};

// max_m tau_m / min_m tau_m. Zero reaction values are left out; any other
// non-positive value (or an all-zero field) is a domain error.
double jump_ratio(const CoefficientField &field);

// omega + h^2 rho per subdomain.
CoefficientField mesh_coefficient(const CoefficientField &omega, const CoefficientField &rho, double h);

// Subdomain labels sorted by decreasing value; ties go to the smaller label.
std::vector<int> descending_ordering(const CoefficientField &field);
// Reverse of descending_ordering: the adversarial choice for interpolation.
std::vector<int> ascending_ordering(const CoefficientField &field);

struct SubdomainInfo
{
  // Labels whose subdomain has no face on the Dirichlet boundary.
  std::vector<int> floating;
  int m0 = 0;
  std::vector<int> ordering;

  // Vertex-connected pieces of each label. A label may split into several
  // pieces (the randomly labelled square does); a piece is floating when
  // none of its cells owns a boundary face.
  std::vector<int> cell_component;
  std::vector<int> component_label;
  std::vector<std::uint8_t> component_floating;
  int floating_components = 0;
};

SubdomainInfo analyze_subdomains(const Mesh &mesh, const CoefficientField &order_by);

enum class CoefficientCase
{
  c1, // omega and rho admit a common decreasing ordering
  c2,
};

std::string_view to_string(CoefficientCase c);

CoefficientCase classify(const CoefficientField &omega, const CoefficientField &rho);

} // namespace rdmg

#endif // RDMG_COEFFICIENTS_HPP
