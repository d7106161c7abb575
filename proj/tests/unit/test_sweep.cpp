#include <doctest.h>

#include <sstream>

#include "rdmg/error.hpp"
#include "rdmg/sweep.hpp"

using namespace rdmg;

namespace
{

std::size_t count(const std::string &s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

SweepConfig small_config()
{
  SweepConfig c;
  c.geometry.geometry = Geometry::square;
  c.levels = {1, 2};
  c.rho2 = {1e-2, 1.0};
  c.preconditioners = {PreconditionerKind::sgs, PreconditionerKind::mg};
  c.threads = 2;
  return c;
}

} // namespace

TEST_CASE("decade grid")
{
  const auto g = decade_grid();
  REQUIRE(g.size() == 10);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == 1e-8);
  CHECK(g.back() == 1e8);
  CHECK(decade_grid(false).size() == 9);
}

TEST_CASE("sweep rows, ordering and determinism")
{
  const SweepConfig c = small_config();
  const ResultTable t = run_sweep(c);
  REQUIRE(t.rows.size() == 2 * 2 * 2);
  CHECK(t.all_converged());
  CHECK(t.rows[0].precond == PreconditionerKind::sgs);
  CHECK(t.rows.back().precond == PreconditionerKind::mg);
  for (const auto &r : t.rows)
  {
    CHECK(r.iterations > 0);
    CHECK(r.kappa_est >= 1.0);
    CHECK(r.lambda_min_est <= r.lambda_max_est);
  }
  SweepConfig one = c;
  one.threads = 1;
  CHECK(run_sweep(one) == t);
}

TEST_CASE("csv round trip")
{
  const ResultTable t = run_sweep(small_config());
  const std::string csv = emit_table(t, TableFormat::csv);
  CHECK(csv.rfind("# ", 0) == 0);
  CHECK(parse_csv(csv) == t);
}

TEST_CASE("markdown pivot has a rectangular layout")
{
  SweepConfig c = small_config();
  c.levels = {1};
  c.rho2 = decade_grid();
  c.preconditioners = {PreconditionerKind::mg};
  const std::string md = emit_table(run_sweep(c), TableFormat::markdown);
  std::istringstream in(md);
  std::string line;
  std::size_t bars = 0;
  int lines = 0;
  while (std::getline(in, line))
  {
    if (line.empty() || line[0] != '|')
      continue;
    if (bars == 0)
      bars = count(line, '|');
    CHECK(count(line, '|') == bars);
    ++lines;
  }
  CHECK(lines == 3);
  CHECK(bars >= 11);
}

TEST_CASE("max over rho aggregation")
{
  SweepConfig c;
  c.geometry.geometry = Geometry::square;
  c.levels = {1};
  c.aggregation = Aggregation::max_over_rho;
  c.rho_ratios = {1e-4, 1e4};
  c.rho2 = decade_grid(false);
  c.omega1 = {1e-8};
  const ResultTable t = run_sweep(c);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].rho_ratio == 1e-4);
  CHECK(t.rows[1].rho_ratio == 1e4);
}

TEST_CASE("empty preconditioner list")
{
  SweepConfig c = small_config();
  c.preconditioners.clear();
  const ResultTable t = run_sweep(c);
  CHECK(t.rows.empty());
  CHECK(parse_csv(emit_table(t, TableFormat::csv)).rows.empty());
}

TEST_CASE("history output")
{
  const MeshHierarchy h = build_problem_hierarchy({Geometry::square, 0, 1}, 1);
  const TransferOps t = build_transfers(h);
  const auto w = CoefficientField::omega({1.0, 1.0});
  const auto r = CoefficientField::rho({1.0, 1.0});
  const SolveReport rep = solve_problem(h, t, w, r, PreconditionerKind::exact, Method::cg, {});
  CHECK(rep.iterations == 1);
  CHECK(count(emit_history(rep), '\n') == 2);
}

TEST_CASE("config parsing")
{
  std::istringstream in("# comment\n"
                        "geometry = square\n"
                        "levels = 1-3\n"
                        "rho2 = decades\n"
                        "omega1 = 1e-8, 1\n"
                        "precond = gs, bpx\n"
                        "max_iter = 50  # trailing\n"
                        "aggregation = max_over_rho\n"
                        "mg_smoother = gs\n");
  const SweepConfig c = parse_sweep_config(in);
  CHECK(c.geometry.geometry == Geometry::square);
  CHECK(c.levels == std::vector<int>{1, 2, 3});
  CHECK(c.rho2.size() == 10);
  CHECK(c.omega1 == std::vector<double>{1e-8, 1.0});
  CHECK(c.preconditioners == std::vector<PreconditionerKind>{PreconditionerKind::sgs, PreconditionerKind::bpx});
  CHECK(c.solve.max_iter == 50);
  CHECK(c.aggregation == Aggregation::max_over_rho);
  CHECK(c.vcycle_smoother == VcycleSmoother::gauss_seidel);
  CHECK(parse_level_list("1,3") == std::vector<int>{1, 3});
  CHECK(parse_value_list("decades+").size() == 9);

  std::istringstream bad("colour = red\n");
  try
  {
    parse_sweep_config(bad);
    FAIL("unknown key accepted");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::configuration);
  }
}

TEST_CASE("result path depends on the configuration")
{
  SweepConfig a = small_config();
  SweepConfig b = a;
  b.levels = {3};
  CHECK(result_path(a, "out") == result_path(a, "out"));
  CHECK(result_path(a, "out") != result_path(b, "out"));
  CHECK(result_path(a, "out").filename().string().rfind("sweep-", 0) == 0);
}
