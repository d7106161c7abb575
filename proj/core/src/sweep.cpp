#include "rdmg/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iomanip>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rdmg/assembly.hpp"
#include "rdmg/error.hpp"

namespace rdmg
{

std::string_view to_string(Geometry g) { return g == Geometry::cube ? "cube" : "square"; }

Geometry parse_geometry(std::string_view name)
{
  if (name == "cube" || name == "cube3d")
    return Geometry::cube;
  if (name == "square" || name == "square2d")
    return Geometry::square;
  fail(ErrorKind::configuration, "unknown geometry '" + std::string(name) + "'");
}

std::string_view to_string(Method m) { return m == Method::cg ? "cg" : "stationary"; }

Method parse_method(std::string_view name)
{
  if (name == "cg" || name == "pcg")
    return Method::cg;
  if (name == "stationary" || name == "richardson")
    return Method::stationary;
  fail(ErrorKind::configuration, "unknown method '" + std::string(name) + "'");
}

Mesh build_coarse_mesh(const GeometryOptions &options)
{
  if (options.geometry == Geometry::cube)
  {
    const auto boxes = default_inclusions();
    return build_cube_mesh(options.coarse_cells > 0 ? options.coarse_cells : 4, boxes);
  }
  return build_square_mesh(options.coarse_cells > 0 ? options.coarse_cells : 6, options.seed);
}

MeshHierarchy build_problem_hierarchy(const GeometryOptions &options, int finest_level)
{
  return build_hierarchy(build_coarse_mesh(options), finest_level);
}

MeshHierarchy truncate_hierarchy(const MeshHierarchy &h, int finest_level)
{
  if (finest_level < 0 || finest_level > h.finest_level())
    fail(ErrorKind::level, "cannot truncate to level " + std::to_string(finest_level));
  MeshHierarchy out;
  out.gamma = h.gamma;
  out.levels.assign(h.levels.begin(), h.levels.begin() + finest_level + 1);
  return out;
}

SolveReport solve_problem(const MeshHierarchy &hierarchy, const TransferOps &transfers, const CoefficientField &omega,
                          const CoefficientField &rho, PreconditionerKind precond, Method method,
                          const SolveOptions &options, VcycleSmoother smoother)
{
  const LevelStack stack = build_level_stack(hierarchy, transfers, omega, rho);
  const auto b = make_preconditioner(precond, stack, transfers, smoother);
  const Vector f = assemble_load(hierarchy.finest(), 1.0);
  return method == Method::cg ? pcg(stack.finest(), *b, f, options) : stationary_solve(stack.finest(), *b, f, options);
}

std::vector<double> decade_grid(bool with_zero)
{
  std::vector<double> g;
  if (with_zero)
    g.push_back(0.0);
  for (int e = -8; e <= 8; e += 2)
    g.push_back(std::pow(10.0, e));
  return g;
}

bool ResultTable::all_converged() const
{
  return std::all_of(rows.begin(), rows.end(), [](const ResultRow &r) { return r.converged; });
}

namespace
{

std::string number(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_number(double x)
{
  if (x == 0.0)
    return "0";
  char buf[32];
  const double e = std::log10(std::abs(x));
  if (std::abs(e - std::round(e)) < 1e-12)
    std::snprintf(buf, sizeof buf, "1e%+03d", static_cast<int>(std::round(e)));
  else
    std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string join(const std::vector<double> &xs, char sep, bool full = true)
{
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    if (i)
      out += sep;
    out += full ? number(xs[i]) : short_number(xs[i]);
  }
  return out;
}

template <class T> std::string join_list(const std::vector<T> &xs)
{
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << (i ? "," : "") << xs[i];
  return out.str();
}

struct Task
{
  int level;
  std::vector<double> omega;
  std::vector<std::vector<double>> rhos; // one solve per entry, aggregated by max
  double ratio;
};

ResultRow solve_cell(const MeshHierarchy &h, const TransferOps &t, const Task &task, PreconditionerKind precond,
                     const SweepConfig &config)
{
  ResultRow best;
  bool first = true;
  for (const auto &rho_values : task.rhos)
  {
    const CoefficientField omega = CoefficientField::omega(task.omega);
    const CoefficientField rho = CoefficientField::rho(rho_values);
    ResultRow row;
    row.level = task.level;
    row.n = h.finest().num_free();
    row.omega = task.omega;
    row.rho = rho_values;
    row.rho_ratio = task.ratio;
    row.precond = precond;
    row.method = config.method;
    try
    {
      const SolveReport rep = solve_problem(h, t, omega, rho, precond, config.method, config.solve, config.vcycle_smoother);
      row.iterations = rep.iterations;
      row.converged = rep.converged;
      row.conv_factor = rep.conv_factor;
      row.lambda_min_est = rep.lambda_min_est;
      row.lambda_max_est = rep.lambda_max_est;
      row.kappa_est = rep.kappa_est;
    }
    catch (const Error &e)
    {
      if (e.kind() != ErrorKind::divergence)
        throw;
      row.iterations = config.solve.max_iter;
      row.converged = false;
    }
    if (first || row.iterations > best.iterations)
      best = row;
    first = false;
  }
  return best;
}

} // namespace

std::string SweepConfig::canonical() const
{
  std::ostringstream out;
  out << "geometry=" << to_string(geometry.geometry) << ";coarse=" << geometry.coarse_cells
      << ";seed=" << geometry.seed << ";levels=" << join_list(levels) << ";omega1=" << join(omega1, ',')
      << ";omega2=" << join(omega2, ',') << ";rho1=" << join(rho1, ',') << ";rho2=" << join(rho2, ',')
      << ";ratios=" << join(rho_ratios, ',') << ";rho_follows=" << rho_follows_omega1 << ";precond=";
  for (std::size_t i = 0; i < preconditioners.size(); ++i)
    out << (i ? "," : "") << to_string(preconditioners[i]);
  out << ";mg_smoother=" << to_string(vcycle_smoother) << ";method=" << to_string(method) << ";tol=" << number(solve.tol) << ";max_iter=" << solve.max_iter
      << ";aggregation=" << (aggregation == Aggregation::single ? "single" : "max_over_rho");
  return out.str();
}

ResultTable run_sweep(const SweepConfig &config)
{
  if (config.levels.empty() || config.omega1.empty() || config.omega2.empty())
    fail(ErrorKind::configuration, "levels and omega grids must be nonempty");
  for (double w : config.omega1)
    if (!(w > 0.0))
      fail(ErrorKind::configuration, "omega values must be positive");
  for (double w : config.omega2)
    if (!(w > 0.0))
      fail(ErrorKind::configuration, "omega values must be positive");

  ResultTable table;
  table.max_iter = config.solve.max_iter;
  if (config.preconditioners.empty())
    return table;

  std::vector<Task> tasks;
  for (int level : config.levels)
    for (double w1 : config.omega1)
      for (double w2 : config.omega2)
      {
        const std::vector<double> omega{w1, w2};
        if (config.rho_follows_omega1)
        {
          tasks.push_back({level, omega, {{w1, w1}}, 0.0});
        }
        else if (config.aggregation == Aggregation::single)
        {
          for (double r1 : config.rho1)
            for (double r2 : config.rho2)
              tasks.push_back({level, omega, {{r1, r2}}, 0.0});
        }
        else
        {
          for (double ratio : config.rho_ratios)
          {
            Task t{level, omega, {}, ratio};
            for (double r2 : config.rho2)
              if (r2 > 0.0 && ratio * r2 >= 1e-8 * (1 - 1e-12) && ratio * r2 <= 1e8 * (1 + 1e-12))
                t.rhos.push_back({ratio * r2, r2});
            if (t.rhos.empty())
              fail(ErrorKind::configuration, "no rho pair in range for ratio " + number(ratio));
            tasks.push_back(std::move(t));
          }
        }
      }

  const int max_level = *std::max_element(config.levels.begin(), config.levels.end());
  const MeshHierarchy full = build_problem_hierarchy(config.geometry, max_level);
  std::map<int, std::pair<MeshHierarchy, TransferOps>> per_level;
  for (int level : config.levels)
    if (!per_level.count(level))
    {
      MeshHierarchy h = truncate_hierarchy(full, level);
      TransferOps t = build_transfers(h);
      per_level.emplace(level, std::make_pair(std::move(h), std::move(t)));
    }

  const std::size_t np = config.preconditioners.size();
  std::vector<ResultRow> rows(tasks.size() * np);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;)
    {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size())
        return;
      try
      {
        const Task &task = tasks[i / np];
        const auto &[h, t] = per_level.at(task.level);
        rows[i] = solve_cell(h, t, task, config.preconditioners[i % np], config);
      }
      catch (...)
      {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
  if (threads == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k)
      pool.emplace_back(worker);
  }
  if (error)
    std::rethrow_exception(error);

  // Preconditioner-major, then task order.
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t i = 0; i < tasks.size(); ++i)
      table.rows.push_back(std::move(rows[i * np + p]));
  return table;
}

TableFormat parse_format(std::string_view name)
{
  if (name == "markdown" || name == "md")
    return TableFormat::markdown;
  if (name == "csv")
    return TableFormat::csv;
  fail(ErrorKind::configuration, "unknown format '" + std::string(name) + "'");
}

namespace
{

const char *csv_header = "level,n,omega,rho,rho_ratio,precond,method,iterations,converged,conv_factor,"
                         "lambda_min_est,lambda_max_est,kappa_est";

std::string emit_csv(const ResultTable &table)
{
  std::ostringstream out;
  out << "# iterations = applications of A; max_iter=" << table.max_iter << '\n' << csv_header << '\n';
  for (const ResultRow &r : table.rows)
    out << r.level << ',' << r.n << ',' << join(r.omega, ';') << ',' << join(r.rho, ';') << ','
        << number(r.rho_ratio) << ',' << to_string(r.precond) << ',' << to_string(r.method) << ',' << r.iterations
        << ',' << (r.converged ? 1 : 0) << ',' << number(r.conv_factor) << ',' << number(r.lambda_min_est) << ','
        << number(r.lambda_max_est) << ',' << number(r.kappa_est) << '\n';
  return out.str();
}

std::string cell_text(const ResultRow &r, int max_iter)
{
  std::string s = r.converged ? std::to_string(r.iterations) : ">" + std::to_string(max_iter);
  if (r.method == Method::stationary && r.converged)
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, " (%.2f)", r.conv_factor);
    s += buf;
  }
  return s;
}

std::string emit_markdown(const ResultTable &table)
{
  // Columns: rho_2, or rho_1/rho_2 for aggregated cells. Rows: everything else.
  auto column_of = [](const ResultRow &r) { return r.rho_ratio != 0.0 ? r.rho_ratio : r.rho.back(); };
  const bool ratios = std::any_of(table.rows.begin(), table.rows.end(), [](const ResultRow &r) { return r.rho_ratio != 0.0; });
  const bool tied = std::all_of(table.rows.begin(), table.rows.end(),
                                [](const ResultRow &r) { return r.rho.size() == 2 && r.rho[0] == r.omega[0] && r.rho[1] == r.omega[0]; });
  std::vector<double> columns;
  std::vector<std::string> row_keys;
  std::map<std::string, std::map<double, std::string>> cells;
  std::map<std::string, std::string> row_label;
  for (const ResultRow &r : table.rows)
  {
    const double col = tied && !table.rows.empty() ? r.omega[0] : column_of(r);
    if (std::find(columns.begin(), columns.end(), col) == columns.end())
      columns.push_back(col);
    std::ostringstream key;
    key << to_string(r.precond) << '|' << r.level << '|';
    if (!tied)
      key << join(r.omega, ';', false);
    if (!ratios && !tied)
      key << '|' << short_number(r.rho.front());
    if (std::find(row_keys.begin(), row_keys.end(), key.str()) == row_keys.end())
    {
      row_keys.push_back(key.str());
      std::ostringstream label;
      label << "| " << to_string(r.precond) << " | " << r.level << " | " << r.n;
      if (!tied)
        label << " | " << join(r.omega, ' ', false);
      if (!ratios && !tied)
        label << " | " << short_number(r.rho.front());
      row_label[key.str()] = label.str();
    }
    cells[key.str()][col] = cell_text(r, table.max_iter);
  }

  std::ostringstream out;
  out << "| precond | level | N";
  if (!tied)
    out << " | omega";
  if (!ratios && !tied)
    out << " | rho_1";
  const char *col_name = tied ? "omega_1" : ratios ? "rho_1/rho_2" : "rho_2";
  for (double c : columns)
    out << " | " << col_name << '=' << short_number(c);
  out << " |\n|";
  const std::size_t fixed = 3 + (!tied ? 1 : 0) + (!ratios && !tied ? 1 : 0);
  for (std::size_t i = 0; i < fixed + columns.size(); ++i)
    out << "---|";
  out << '\n';
  for (const std::string &key : row_keys)
  {
    out << row_label[key];
    for (double c : columns)
    {
      const auto it = cells[key].find(c);
      out << " | " << (it == cells[key].end() ? "" : it->second);
    }
    out << " |\n";
  }
  return out.str();
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;)
  {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

double to_double(const std::string &s)
{
  std::size_t used = 0;
  double x = 0.0;
  try
  {
    x = std::stod(s, &used);
  }
  catch (const std::exception &)
  {
    fail(ErrorKind::io, "not a number: '" + s + "'");
  }
  if (used != s.size())
    fail(ErrorKind::io, "not a number: '" + s + "'");
  return x;
}

std::vector<double> to_doubles(const std::string &s)
{
  std::vector<double> out;
  for (const auto &part : split(s, ';'))
    out.push_back(to_double(part));
  return out;
}

} // namespace

std::string emit_table(const ResultTable &table, TableFormat format)
{
  return format == TableFormat::csv ? emit_csv(table) : emit_markdown(table);
}

ResultTable parse_csv(std::string_view text)
{
  ResultTable table;
  bool header_seen = false;
  for (const auto &raw : split(text, '\n'))
  {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line.front() == '#')
    {
      if (const auto pos = line.find("max_iter="); pos != std::string::npos)
        table.max_iter = static_cast<int>(to_double(line.substr(pos + 9)));
      continue;
    }
    if (!header_seen)
    {
      if (line != csv_header)
        fail(ErrorKind::io, "unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 13)
      fail(ErrorKind::io, "CSV row has " + std::to_string(f.size()) + " fields, expected 13");
    ResultRow r;
    r.level = static_cast<int>(to_double(f[0]));
    r.n = static_cast<std::size_t>(to_double(f[1]));
    r.omega = to_doubles(f[2]);
    r.rho = to_doubles(f[3]);
    r.rho_ratio = to_double(f[4]);
    r.precond = f[5] == "exact" ? PreconditionerKind::exact : parse_preconditioner(f[5]);
    r.method = parse_method(f[6]);
    r.iterations = static_cast<int>(to_double(f[7]));
    r.converged = f[8] == "1";
    r.conv_factor = to_double(f[9]);
    r.lambda_min_est = to_double(f[10]);
    r.lambda_max_est = to_double(f[11]);
    r.kappa_est = to_double(f[12]);
    table.rows.push_back(std::move(r));
  }
  if (!header_seen)
    fail(ErrorKind::io, "CSV header missing");
  return table;
}

std::string emit_history(const SolveReport &report) { return history_csv(report); }

std::filesystem::path result_path(const SweepConfig &config, const std::filesystem::path &dir)
{
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.canonical())
  {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char name[40];
  std::snprintf(name, sizeof name, "sweep-%016llx.csv", static_cast<unsigned long long>(h));
  return dir / name;
}

} // namespace rdmg
