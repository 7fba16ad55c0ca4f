#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deltalab/experiment.hpp"
#include "deltalab/oracles.hpp"

using namespace deltalab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "deltalab_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config validation names the missing field") {
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("{}"), ConfigError);
  try {
    parse_config_text(R"({"experiment":"les","output_dir":"x","master_seed":1,
                          "dimension":1,"L":10,"w":2,"realizations":3})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("E0") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text(R"({"experiment":"nope","output_dir":"x",
                                        "master_seed":1})"),
                  ConfigError);
  // Valid config with auto E0.
  const ExperimentConfig cfg = parse_config_text(
      R"({"experiment":"les","output_dir":"x","master_seed":1,"dimension":1,
          "L":10,"E0":"auto-dos-scan","w":2,"realizations":3})");
  CHECK(cfg.auto_e0);
  CHECK(!cfg.e0.has_value());
}

TEST_CASE("spectrum experiment: determinism and oracle fixture") {
  const fs::path dir_a = fresh_dir("spec_a");
  const fs::path dir_b = fresh_dir("spec_b");
  const std::string base = R"({"experiment":"spectrum","master_seed":91,
    "dimension":1,"L":12,"bc":"dirichlet","window":[-3.0,-0.01],
    "realizations":6,"output_dir":")";
  run_experiment(parse_config_text(base + dir_a.string() + "\"}"));
  run_experiment(parse_config_text(base + dir_b.string() + "\"}"));
  const std::string csv_a = slurp(dir_a / "eigenvalues.csv");
  CHECK(csv_a == slurp(dir_b / "eigenvalues.csv"));
  CHECK(csv_a.find("realization_id,eigenvalue,multiplicity") == 0);

  // Every row agrees with the shooting oracle to 1e-8 relative.
  const DomainSpec domain = DomainSpec::cube(1, 12, BoundaryCondition::Dirichlet);
  std::istringstream rows(csv_a.substr(csv_a.find('\n') + 1));
  std::string line;
  std::int64_t prev_id = -1;
  std::vector<double> oracle;
  std::size_t cursor = 0;
  while (std::getline(rows, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const std::int64_t id = std::stoll(line.substr(0, c1));
    const double energy = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    if (id != prev_id) {
      const CouplingField omega = sample_couplings({}, domain.sites(), 91, id);
      oracle = shoot_spectrum(ShootingProblem::from_domain(domain, omega), -3.0, -0.01)
                   .expanded();
      cursor = 0;
      prev_id = id;
    }
    REQUIRE(cursor < oracle.size());
    CHECK(std::abs(energy - oracle[cursor]) <= 1e-8 * std::abs(oracle[cursor]));
    ++cursor;
  }
}

TEST_CASE("resume recomputes only the missing realizations") {
  const fs::path full = fresh_dir("resume_full");
  const fs::path part = fresh_dir("resume_part");
  const std::string base = R"({"experiment":"spectrum","master_seed":77,
    "dimension":1,"L":10,"window":[-3.0,-0.05],"realizations":8,"output_dir":")";
  run_experiment(parse_config_text(base + full.string() + "\"}"));

  // Simulate an interrupted run: keep only realizations 0-3 on disk.
  const std::string csv = slurp(full / "eigenvalues.csv");
  std::istringstream in(csv);
  std::ofstream out(part / "eigenvalues.csv");
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out << line << '\n';
      header = false;
      continue;
    }
    if (std::stoll(line.substr(0, line.find(','))) <= 3) out << line << '\n';
  }
  out.close();
  run_experiment(parse_config_text(base + part.string() + "\"}"));
  CHECK(slurp(part / "eigenvalues.csv") == csv);
}

TEST_CASE("les experiment produces rescaled csv, summary and plot data") {
  const fs::path dir = fresh_dir("les");
  const std::string cfg = R"({"experiment":"les","master_seed":5,"dimension":1,
    "L":24,"E0":-1.0,"w":6.0,"realizations":30,"output_dir":")" +
                          dir.string() + "\"}";
  run_experiment(parse_config_text(cfg));
  CHECK(fs::exists(dir / "eigenvalues.csv"));
  CHECK(fs::exists(dir / "rescaled.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("intensity_n_hat") != std::string::npos);
  CHECK(summary.find("finite-volume window-count proxy") != std::string::npos);
  // every rescaled point is within [-w, w]
  std::istringstream in(slurp(dir / "rescaled.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const double x = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(x) <= 6.0 + 1e-9);
  }
}

TEST_CASE("rankone experiment reports zero violations") {
  const fs::path dir = fresh_dir("rankone");
  const std::string cfg = R"({"experiment":"rankone","master_seed":3,
    "trials":300,"matrix_size":7,"output_dir":")" +
                          dir.string() + "\"}";
  run_experiment(parse_config_text(cfg));
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"violations\": 0") != std::string::npos);
}

TEST_CASE("auto-dos-scan picks an energy inside the scan window") {
  ExperimentConfig cfg = parse_config_text(
      R"({"experiment":"les","master_seed":12,"dimension":1,"L":20,
          "E0":"auto-dos-scan","w":4,"realizations":5,"output_dir":"unused",
          "auto_scan":{"e_min":-2.2,"e_max":-0.4,"delta":0.2,"realizations":40}})");
  const double e0 = auto_dos_scan(cfg);
  CHECK(e0 > -2.2);
  CHECK(e0 < -0.4);
}
