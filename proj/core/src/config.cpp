#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <string>

#include "rdmg/error.hpp"
#include "rdmg/sweep.hpp"

namespace rdmg
{

namespace
{

std::string trim(std::string_view s)
{
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
    ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
    --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> items(std::string_view text)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size())
  {
    const auto pos = std::min(text.find(',', start), text.size());
    if (auto t = trim(text.substr(start, pos - start)); !t.empty())
      out.push_back(std::move(t));
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string &s)
{
  std::size_t used = 0;
  try
  {
    const double x = std::stod(s, &used);
    if (used == s.size())
      return x;
  }
  catch (const std::exception &)
  {
  }
  fail(ErrorKind::configuration, "not a number: '" + s + "'");
}

int parse_int(const std::string &s)
{
  std::size_t used = 0;
  try
  {
    const int x = std::stoi(s, &used);
    if (used == s.size())
      return x;
  }
  catch (const std::exception &)
  {
  }
  fail(ErrorKind::configuration, "not an integer: '" + s + "'");
}

bool parse_bool(const std::string &s)
{
  if (s == "1" || s == "true" || s == "yes" || s == "on")
    return true;
  if (s == "0" || s == "false" || s == "no" || s == "off")
    return false;
  fail(ErrorKind::configuration, "not a boolean: '" + s + "'");
}

} // namespace

std::vector<int> parse_level_list(std::string_view text)
{
  std::vector<int> out;
  for (const auto &item : items(text))
  {
    if (const auto dash = item.find('-'); dash != std::string::npos && dash > 0)
    {
      const int lo = parse_int(trim(item.substr(0, dash)));
      const int hi = parse_int(trim(item.substr(dash + 1)));
      if (hi < lo)
        fail(ErrorKind::configuration, "empty level range '" + item + "'");
      for (int l = lo; l <= hi; ++l)
        out.push_back(l);
    }
    else
    {
      out.push_back(parse_int(item));
    }
  }
  if (out.empty())
    fail(ErrorKind::configuration, "empty level list");
  for (int l : out)
    if (l < 0)
      fail(ErrorKind::configuration, "negative level");
  return out;
}

std::vector<double> parse_value_list(std::string_view text)
{
  std::vector<double> out;
  for (const auto &item : items(text))
  {
    if (item == "decades")
    {
      const auto g = decade_grid(true);
      out.insert(out.end(), g.begin(), g.end());
    }
    else if (item == "decades+")
    {
      const auto g = decade_grid(false);
      out.insert(out.end(), g.begin(), g.end());
    }
    else
    {
      out.push_back(parse_number(item));
    }
  }
  if (out.empty())
    fail(ErrorKind::configuration, "empty value list");
  return out;
}

SweepConfig parse_sweep_config(std::istream &in)
{
  SweepConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string t = trim(line);
    if (t.empty())
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::configuration, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));

    if (key == "geometry")
      config.geometry.geometry = parse_geometry(value);
    else if (key == "coarse_cells")
      config.geometry.coarse_cells = parse_int(value);
    else if (key == "seed")
      config.geometry.seed = static_cast<std::uint64_t>(parse_number(value));
    else if (key == "levels")
      config.levels = parse_level_list(value);
    else if (key == "omega1")
      config.omega1 = parse_value_list(value);
    else if (key == "omega2")
      config.omega2 = parse_value_list(value);
    else if (key == "rho1")
      config.rho1 = parse_value_list(value);
    else if (key == "rho2")
      config.rho2 = parse_value_list(value);
    else if (key == "rho_ratios")
      config.rho_ratios = parse_value_list(value);
    else if (key == "rho_follows_omega1")
      config.rho_follows_omega1 = parse_bool(value);
    else if (key == "precond")
    {
      config.preconditioners.clear();
      for (const auto &p : items(value))
        config.preconditioners.push_back(parse_preconditioner(p));
    }
    else if (key == "mg_smoother")
      config.vcycle_smoother = parse_vcycle_smoother(value);
    else if (key == "method")
      config.method = parse_method(value);
    else if (key == "tol")
      config.solve.tol = parse_number(value);
    else if (key == "max_iter")
      config.solve.max_iter = parse_int(value);
    else if (key == "aggregation")
    {
      if (value == "single")
        config.aggregation = Aggregation::single;
      else if (value == "max_over_rho" || value == "max-rho")
        config.aggregation = Aggregation::max_over_rho;
      else
        fail(ErrorKind::configuration, "unknown aggregation '" + value + "'");
    }
    else if (key == "threads")
      config.threads = parse_int(value);
    else
      fail(ErrorKind::configuration, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return config;
}

SweepConfig load_sweep_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    fail(ErrorKind::io, "cannot open " + path.string());
  return parse_sweep_config(in);
}

} // namespace rdmg
