#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "torus_lab/errors.hpp"

using namespace torus_lab;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

json base() {
  return json::parse(R"({
    "schema": "torus-lab/1",
    "maps": [{"matrix": [[2, 1], [1, 1]]}, {"matrix": [[3, 5], [1, 2]]}]
  })");
}

std::string invalid_field(const json& doc) {
  try {
    cli::parse_config(doc);
  } catch (const ConfigInvalid& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("torus_lab_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("defaults") {
    const cli::RunConfig cfg = cli::parse_config(base());
    CHECK(cfg.maps.size() == 2);
    CHECK(cfg.weights == std::vector<double>{0.5, 0.5});
    CHECK(cfg.seed == 1);
    CHECK(cfg.reference.is_lebesgue());
  }

  TEST_CASE("invalid configs name the failing field") {
    json d = base();
    d["schema"] = "torus-lab/0";
    CHECK(invalid_field(d).rfind("schema:", 0) == 0);

    d = base();
    d["maps"][1]["matrix"] = json::parse("[[2, 0], [0, 1]]");
    CHECK(invalid_field(d).rfind("maps[1]:", 0) == 0);

    d = base();
    d["maps"][0]["matrix"] = json::parse("[[2, 1.5], [1, 1]]");
    CHECK(invalid_field(d).rfind("maps[0].matrix:", 0) == 0);

    d = base();
    d["weights"] = json::parse("[0.7, 0.7]");
    CHECK(invalid_field(d).rfind("weights:", 0) == 0);

    d = base();
    d["cones"] = json::parse(R"({"unstable": [0, 1], "stable": [0.5, 2]})");
    CHECK(invalid_field(d).rfind("cones:", 0) == 0);

    d = base();
    d["scales"] = json::parse("[0.1, 0.2]");
    CHECK(invalid_field(d).rfind("scales", 0) == 0);

    d = base();
    d["grid"] = 10;
    CHECK(invalid_field(d).rfind("grid:", 0) == 0);

    d = base();
    d["colour"] = 1;
    CHECK(invalid_field(d).rfind("colour:", 0) == 0);

    d = base();
    d["maps"][0]["modes"] = json::parse(R"([{"k": [1, 0], "amplitude": [0.2]}])");
    CHECK(invalid_field(d).rfind("maps[0].modes[0].amplitude:", 0) == 0);
  }

  TEST_CASE("command sections are checked field by field") {
    json d = base();
    d["commands"]["expansion"] = json::parse(R"({"dir_grid": 2})");
    const fs::path cfg = scratch("bad_section.json");
    std::ofstream(cfg) << d.dump();
    std::ostringstream err;
    CHECK(cli::run("expansion", cfg, scratch("bad_section_out"), {}, err) == cli::kError);
    CHECK(err.str().find("commands.expansion.dir_grid") != std::string::npos);

    d["commands"]["expansion"] = json::parse(R"({"depth": 2})");
    std::ofstream(cfg) << d.dump();
    err.str("");
    CHECK(cli::run("expansion", cfg, scratch("bad_section_out"), {}, err) == cli::kError);
    CHECK(err.str().find("commands.expansion.depth") != std::string::npos);
  }

  TEST_CASE("packaged certify configs give the documented exit codes") {
    const fs::path dir = TORUS_LAB_CONFIG_DIR;
    std::ostringstream err;
    const fs::path out_ab = scratch("certify_ab");
    CHECK(cli::run("certify", dir / "ab.json", out_ab, {}, err) == cli::kOk);
    const std::string summary = slurp(out_ab / "summary.txt");
    CHECK(summary.find("passed=true\n") != std::string::npos);
    CHECK(summary.find("status=ok\n") != std::string::npos);
    CHECK(fs::exists(out_ab / "certify_grid.csv"));

    const fs::path out_aa = scratch("certify_aa");
    CHECK(cli::run("certify", dir / "aa.json", out_aa, {}, err) == cli::kViolated);
    CHECK(slurp(out_aa / "summary.txt").find("witness_condition=C3\n") != std::string::npos);
  }

  TEST_CASE("uniform rho-norm config is flat at pi") {
    const fs::path out = scratch("rho_uniform");
    std::ostringstream err;
    REQUIRE(cli::run("rho-norm", fs::path(TORUS_LAB_CONFIG_DIR) / "uniform.json", out, {}, err) == cli::kOk);
    std::istringstream csv(slurp(out / "rho_norm.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "rho,norm");
    int rows = 0;
    while (std::getline(csv, line)) {
      const double norm = std::stod(line.substr(line.find(',') + 1));
      CHECK(norm == doctest::Approx(kPi).epsilon(0.01));
      ++rows;
    }
    CHECK(rows == 6);
  }

  TEST_CASE("unknown command and missing config") {
    std::ostringstream err;
    CHECK(cli::run("plot", "nope.json", scratch("x"), {}, err) == cli::kError);
    CHECK(cli::run("certify", "/nonexistent/config.json", scratch("x"), {}, err) == cli::kError);
    CHECK(err.str().find("config") != std::string::npos);
  }

  TEST_CASE("seed override is recorded") {
    const fs::path out = scratch("seed");
    std::ostringstream err;
    cli::RunOptions opts;
    opts.seed = 99;
    REQUIRE(cli::run("periodic", fs::path(TORUS_LAB_CONFIG_DIR) / "aa.json", out, opts, err) == cli::kOk);
    CHECK(slurp(out / "summary.txt").find("seed=99\n") != std::string::npos);
  }
}
