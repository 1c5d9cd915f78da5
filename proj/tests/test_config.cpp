#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nlse/harness.hpp"

using namespace nlse;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nlse_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal potential config") {
  const auto c = parse_config("kernel = coulomb3d\nL = 8\nN = 64\nmethod = nufft\n");
  CHECK(c.command == Command::Potential);
  CHECK(c.kernel.family == KernelFamily::Coulomb3D);
  CHECK(c.grid.dim == 3);
  CHECK(c.grid.n[2] == 64);
  CHECK(c.grid.h[0] == 0.25);
  CHECK(c.method == default_method(KernelFamily::Coulomb3D));
  CHECK(c.tol == 1e-12);
}

TEST_CASE("rejected configs name the problem") {
  CHECK(error_of("kernel = coulomb3d\nL = 8\nN = 63\n").find("npoints must be even") != std::string::npos);
  CHECK(error_of("kernel = confined2d\nL = 8\nN = 64\n").find("epsilon") != std::string::npos);
  CHECK(error_of("kernel = coulomb2d\nL = 8\nN = 64\nbogus = 1\n").find("'bogus'") != std::string::npos);
  CHECK(error_of("kernel = coulomb2d\nL = eight\nN = 64\n").find("expected a number") != std::string::npos);
  CHECK(error_of("kernel = coulomb2d\nL = 8\nN = 64.5\n").find("expected an integer") != std::string::npos);
  CHECK(error_of("kernel = coulomb2d\nN = 64\n").find("missing required key 'L'") != std::string::npos);
  CHECK(error_of("kernel = coulomb2d\nL = 8\nN = 64\nL = 4\n").find("duplicate") != std::string::npos);
  CHECK(error_of("kernel = coulomb2d\nL = 8\nN = 64\n[nowhere]\n").find("[nowhere]") != std::string::npos);
  CHECK(error_of("command = dynamics\nkernel = coulomb2d\nL = 8\nN = 64\n").find("dynamics.t_end") !=
        std::string::npos);
  CHECK(error_of("kernel = coulomb2d\nL = 8\nN = 64\n[groundstate]\ntrack_energy = maybe\n").find("boolean") !=
        std::string::npos);
  CHECK(error_of("kernel = coulomb3d\nL = 8\nN = 64\npotential = honeycomb\n").find("two-dimensional") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config("command = dynamics\ndemo = honeycomb\n", Command::Groundstate), ConfigError);
}

TEST_CASE("sections, per-axis values and derived configs") {
  const auto c = parse_config(
      "command = groundstate  # trailing comment\n"
      "kernel = coulomb2d\n"
      "L = 8, 4\n"
      "N = 64, 32\n"
      "beta = -5\n"
      "gamma = 1, 2\n"
      "[groundstate]\n"
      "tau = 0.005\n"
      "eps0 = 1e-9\n"
      "coarse_levels = 1\n");
  CHECK(c.grid.L[1] == 4.0);
  CHECK(c.grid.n[1] == 32);
  const auto g = c.groundstate_config();
  CHECK(g.beta == -5.0);
  CHECK(g.tau == 0.005);
  CHECK(g.eps0 == 1e-9);
  CHECK(g.coarse_levels == 1);
  CHECK(g.V.gamma[1] == 2.0);

  const auto d = parse_config("command = dynamics\nkernel = laplace2d\nL = 8\nN = 32\n[dynamics]\ntau = 0.01\n"
                              "t_end = 0.1\norder = 2\nsnapshots = 0, 0.05\n")
                     .dynamics_config();
  CHECK(d.scheme.order == 2);
  CHECK(d.steps() == 10);
  CHECK(d.snapshot_times.size() == 2);

  const auto t = parse_config("command = reproduce-table\n[table]\nid = 7\nfull = true\n");
  CHECK(t.table.id == 7);
  CHECK(t.full);
  const auto demo = parse_config("demo = honeycomb\n", Command::Dynamics);
  CHECK(demo.demo == "honeycomb");
}

TEST_CASE("shipped example configs load") {
  int n = 0;
  for (const auto& e : fs::directory_iterator(NLSE_CONFIG_DIR)) {
    if (e.path().extension() != ".cfg") continue;
    CAPTURE(e.path().string());
    const auto c = load_config(e.path().string());
    if (c.command == Command::Groundstate) CHECK_NOTHROW(c.groundstate_config());
    if (c.command == Command::Dynamics) CHECK_NOTHROW(c.dynamics_config());
    ++n;
  }
  CHECK(n >= 4);
}

TEST_CASE("number formatting and table ids") {
  CHECK(format_sci(1.667e-8) == "1.667E-08");
  CHECK(format_sci(0.146) == "1.460E-01");
  CHECK(format_sci(std::nan("")) == "");
  CHECK(table_ids().size() == 15);
  CHECK_THROWS_AS(table_title(16), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_table(0), std::invalid_argument);
}

TEST_CASE("2D Poisson table: values, rates and reproducibility") {
  const auto t = reproduce_table(5);
  const TableCell* nufft = nullptr;
  std::vector<double> rates;
  for (const auto& c : t.cells) {
    CHECK(!c.method.empty());
    CHECK(!c.N.empty());
    if (c.block == "NUFFT" && c.row == "L=8" && c.column == "h=1/4") nufft = &c;
    if (c.block == "FDM" && c.row == "L=8 rate" && c.status == "ok") rates.push_back(c.value);
  }
  REQUIRE(nufft);
  CHECK(nufft->value <= 1e-11);
  REQUIRE(rates.size() == 4);
  for (double r : rates) CHECK(std::abs(r - 2.0) <= 0.05);

  std::ostringstream a, b;
  write_table_csv(a, t);
  write_table_csv(b, reproduce_table(5));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("table,block,row,column,value,target,method,kernel,dim,L,h,N,tau,reference,status\n", 0) == 0);
}

TEST_CASE("potential run writes the field, e_h and a manifest") {
  const auto dir = scratch("potential");
  auto c = parse_config("kernel = coulomb2d\nL = 8\nN = 64\n[density]\nsigma = 1.0954451150103321\n");
  c.out = dir.string();
  std::ostringstream log;
  const auto rep = run(c, log);
  CHECK(fs::exists(dir / "potential.field"));
  CHECK(fs::exists(dir / "density.field"));
  const auto csv = slurp(dir / "potential.csv");
  CHECK(csv.find("e_h") != std::string::npos);
  CHECK(log.str().find("e_h = ") != std::string::npos);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["command"] == "potential");
  CHECK(m["library_version"] == library_version());
  CHECK(m["e_h"].get<double>() <= 1e-13);
  CHECK(m["wall_seconds"].get<double>() >= 0.0);
  CHECK(m["config"].get<std::string>().find("coulomb2d") != std::string::npos);
  CHECK(rep.files.back() == "manifest.json");
  const auto loaded = read_field((dir / "potential.field").string());
  CHECK(loaded.grid == c.grid);
}

TEST_CASE("ground-state and dynamics runs write their artifacts") {
  SUBCASE("ground state") {
    const auto dir = scratch("gs");
    auto c = parse_config("command = groundstate\nkernel = coulomb2d\nL = 6\nN = 32\nbeta = 1\n");
    c.out = dir.string();
    std::ostringstream log;
    run(c, log);
    CHECK(fs::exists(dir / "phi_g.field"));
    const auto csv = slurp(dir / "energy.csv");
    CHECK(csv.rfind("kernel,method,beta,E_g,mu_g,E_kin,E_pot,E_int,I_h,steps,residual\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  }
  SUBCASE("dynamics") {
    const auto dir = scratch("dyn");
    auto c = parse_config("command = dynamics\nkernel = coulomb2d\nL = 8\nN = 32\nbeta = 5\n[dynamics]\n"
                          "tau = 0.01\nt_end = 0.1\ntrace_every = 5\nsnapshots = 0, 0.1\n");
    c.out = dir.string();
    std::ostringstream log;
    run(c, log);
    CHECK(fs::exists(dir / "density_t0.000.field"));
    CHECK(fs::exists(dir / "density_t0.100.field"));
    const auto trace = slurp(dir / "trace.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 4);
  }
}

TEST_CASE("errors map to exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(std::invalid_argument("x")) == 2);
  CHECK(exit_code_for(ConvergenceError("x", 3, 1.0)) == 3);
  CHECK(exit_code_for(std::runtime_error("x")) == 4);

  auto c = parse_config("command = groundstate\nkernel = coulomb2d\nL = 6\nN = 32\nbeta = 1\n[groundstate]\n"
                        "max_steps = 2\n");
  c.out = scratch("fail").string();
  std::ostringstream log;
  try {
    run(c, log);
    FAIL("expected a convergence error");
  } catch (const std::exception& e) {
    CHECK(exit_code_for(e) == 3);
  }
}
