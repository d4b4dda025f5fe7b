#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/cli.hpp"
#include "dicke/mean_field.hpp"

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "dicke");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dicke::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("no column " + name);
  }
  double number(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(column(name))); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      cells.push_back(cell);
      cell.clear();
    } else cell += c;
  }
  cells.push_back(cell);
  return cells;
}

// Parses the named table out of CSV text that may hold several tables.
Csv parse_table(const std::string& text, const std::string& table) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line.rfind("# table: ", 0) == 0) {
      if (inside) break;
      inside = line.substr(9) == table;
      continue;
    }
    if (!inside || line.empty() || line[0] == '#') continue;
    if (csv.header.empty()) csv.header = split(line);
    else csv.rows.push_back(split(line));
  }
  return csv;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
  ~ScopedEnv() { unsetenv(name_); }

 private:
  const char* name_;
};

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "dicke_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, BareCriticalReproducesTwentyAtomCoupling) {
  const Invocation r = run({"critical"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv csv = parse_table(r.out, "critical");
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][csv.column("n_atoms")], "20");
  EXPECT_NEAR(csv.number(0, "gamma_c"), 0.552, 1e-3);
  EXPECT_EQ(csv.rows[0][csv.column("diagnostic")], "");
}

TEST(Cli, CriticalAtomSequence) {
  const Invocation r = run({"critical", "--n-atoms", "10,20,40,80"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv csv = parse_table(r.out, "critical");
  ASSERT_EQ(csv.rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_GT(csv.number(i, "gamma_c"), 0.5);
    if (i) EXPECT_LT(csv.number(i, "gamma_c"), csv.number(i - 1, "gamma_c"));
  }
}

TEST(Cli, CriticalWithoutTransitionWritesDiagnosticRow) {
  const Invocation r = run({"critical", "--n-atoms", "20", "--bracket", "0.3:0.4"});
  EXPECT_EQ(r.code, 2);
  const Csv csv = parse_table(r.out, "critical");
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][csv.column("gamma_c")], "nan");
  EXPECT_NE(csv.rows[0][csv.column("diagnostic")], "");
  EXPECT_NE(r.err, "");
}

TEST(Cli, SurfaceAtCrossingHasEqualDepthMinima) {
  const Invocation r = run({"surface", "--gamma", "0.552", "--resolution", "31x21"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv minima = parse_table(r.out, "minima");
  ASSERT_EQ(minima.rows.size(), 2u);
  EXPECT_LT(std::abs(minima.number(0, "total_energy") - minima.number(1, "total_energy")), 1e-3 * 20);
  EXPECT_EQ(parse_table(r.out, "grid").rows.size(), 31u * 21u);
  EXPECT_EQ(parse_table(r.out, "section").rows.size(), 31u);
}

TEST(Cli, SurfaceBelowCoexistenceListsGlobalMinimumNearOne) {
  const Invocation r = run({"surface", "--gamma", "0.545", "--resolution", "11x11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv minima = parse_table(r.out, "minima");
  ASSERT_GE(minima.rows.size(), 1u);
  EXPECT_NEAR(minima.number(0, "q"), 1.0, 0.5);
}

TEST(Cli, ConfigErrorsExitWithOne) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"surface", "--gamma", "0.552", "--q-range", "3:1"},
           {"sweep", "--gamma-range", "0.7:0.4:0.01"},
           {"sweep", "--gamma-range", "0.4:0.7:0"},
           {"sweep", "--gamma-range", "0.4:0.7"},
           {"sweep", "--gamma", "0.5", "--gamma-range", "0.4:0.7:0.1"},
           {"sweep"},
           {"surface", "--gamma-range", "0.5:0.6:0.1"},
           {"critical", "--omega-a", "-1"},
           {"critical", "--n-atoms", "0"},
           {"critical", "--tol-bisect", "0"},
           {"critical", "--format", "xml"},
           {"critical", "--bogus"},
           {"critical", "--surface", "exact"},
           {"surface", "--gamma", "0.5", "--resolution", "1x4"},
           {},
       }) {
    const Invocation r = run(args);
    EXPECT_EQ(r.code, 1) << (args.empty() ? "<none>" : args[0]) << " " << r.out;
    EXPECT_NE(r.err, "");
  }
}

TEST(Cli, HelpExitsCleanly) {
  const Invocation r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("critical"), std::string::npos);
}

TEST(Cli, CsvSchemaAndPrecision) {
  const Invocation r = run({"sweep", "--surface", "mean_field", "--gamma-range", "0.3:0.9:0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# artifact: dicke", 0), 0u);
  EXPECT_NE(r.out.find("# version: "), std::string::npos);
  const Csv csv = parse_table(r.out, "sweep");
  ASSERT_EQ(csv.rows.size(), 13u);
  for (const auto& row : csv.rows) EXPECT_EQ(row.size(), csv.header.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const double g = csv.number(i, "gamma");
    const double ref = dicke::mean_field_critical_points(dicke::ModelParams(1.0, g, 20)).front().per_atom_energy;
    EXPECT_NEAR(csv.number(i, "per_atom_energy"), ref, 1e-10);
  }
  // 17 significant digits round-trip the double exactly.
  EXPECT_EQ(csv.rows[1][csv.column("gamma")], "0.34999999999999998");
}

TEST(Cli, JsonOutputCarriesMetadata) {
  const Invocation r = run({"critical", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["metadata"]["command"], "critical");
  EXPECT_EQ(doc["metadata"]["omega_a"], 1.0);
  EXPECT_EQ(doc["metadata"]["tol_bisect"], 1e-4);
  ASSERT_EQ(doc["critical"].size(), 1u);
  EXPECT_NEAR(doc["critical"][0]["gamma_c"].get<double>(), 0.552, 1e-3);
}

TEST(Cli, OutputIsByteIdenticalAcrossRuns) {
  const auto args = std::vector<std::string>{"surface", "--gamma", "0.55", "--resolution", "9x7"};
  EXPECT_EQ(run(args).out, run(args).out);
  const auto sw = std::vector<std::string>{"sweep", "--surface", "exact", "--n-atoms", "4", "--gamma-range", "0.2:0.6:0.2"};
  EXPECT_EQ(run(sw).out, run(sw).out);
}

TEST(Cli, SurfaceWritesSiblingFiles) {
  const auto dir = temp_dir();
  const auto path = dir / "grid.csv";
  const Invocation r = run({"surface", "--gamma", "0.552", "--resolution", "7x5", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "");
  for (const char* name : {"grid.csv", "grid.minima.csv", "grid.section.csv"}) {
    std::ifstream f(dir / name);
    ASSERT_TRUE(f.good()) << name;
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_NE(ss.str().find("# command: surface"), std::string::npos);
  }
  EXPECT_EQ(run({"critical", "--out", (dir / "missing" / "x.csv").string()}).code, 1);
}

TEST(Cli, ExactSweepColumns) {
  const Invocation r = run({"sweep", "--surface", "exact", "--n-atoms", "6", "--gamma-range", "0.3:0.5:0.1", "--overlap"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv csv = parse_table(r.out, "sweep");
  ASSERT_EQ(csv.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(csv.number(i, "chi_fidelity"), 0.0);
    EXPECT_GT(csv.number(i, "var_q"), 0.0);
    EXPECT_GT(csv.number(i, "sacs_overlap"), 0.5);
    EXPECT_LE(csv.number(i, "sacs_overlap"), 1.0);
  }
}

TEST(Cli, EnvironmentOverridesConfigAndFlagsOverrideBoth) {
  const auto cfg = temp_dir() / "run.toml";
  {
    std::ofstream f(cfg);
    f << "n-atoms = [6]\ngamma = 0.3\nsurface = \"mean_field\"\n";
  }
  const auto n_of = [](const Invocation& r) { return parse_table(r.out, "sweep").rows.at(0).at(0); };
  const Invocation from_config = run({"sweep", "--config", cfg.string()});
  ASSERT_EQ(from_config.code, 0) << from_config.err;
  EXPECT_EQ(n_of(from_config), "6");
  {
    ScopedEnv env("DICKE_N_ATOMS", "8");
    const Invocation from_env = run({"sweep", "--config", cfg.string()});
    ASSERT_EQ(from_env.code, 0) << from_env.err;
    EXPECT_EQ(n_of(from_env), "8");
    const Invocation from_flag = run({"sweep", "--config", cfg.string(), "--n-atoms", "9"});
    ASSERT_EQ(from_flag.code, 0) << from_flag.err;
    EXPECT_EQ(n_of(from_flag), "9");
  }
}

TEST(Cli, ValidateDefaultPasses) {
  const Invocation r = run({"validate"});
  EXPECT_EQ(r.code, 0) << r.out;
  const Csv csv = parse_table(r.out, "checks");
  EXPECT_GE(csv.rows.size(), 8u);
  for (const auto& row : csv.rows) EXPECT_EQ(row[csv.column("status")], "PASS") << row[0];
}

TEST(Cli, ValidateCatchesInjectedCouplingSignError) {
  const Invocation r = run({"validate", "--inject-coupling-sign-error"});
  EXPECT_EQ(r.code, 3);
  const Csv csv = parse_table(r.out, "checks");
  bool embedding_failed = false;
  for (const auto& row : csv.rows)
    if (row[0] == "embedding_vs_sacs_energy") embedding_failed = row[csv.column("status")] == "FAIL";
  EXPECT_TRUE(embedding_failed);
}

TEST(Cli, ValidateWithImpossibleToleranceReportsResiduals) {
  const Invocation r = run({"validate", "--tol-fd", "1e-15"});
  EXPECT_EQ(r.code, 3);
  const Csv csv = parse_table(r.out, "checks");
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    if (csv.rows[i][0].find("_fd") == std::string::npos) continue;
    EXPECT_EQ(csv.rows[i][csv.column("status")], "FAIL");
    EXPECT_GT(csv.number(i, "worst"), 1e-15);
    EXPECT_TRUE(std::isfinite(csv.number(i, "worst")));
  }
}
