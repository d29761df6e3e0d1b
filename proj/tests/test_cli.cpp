#include "gbmcli/commands.hpp"

#include "gbm/config.hpp"
#include "gbm/mesh.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult gbmsim(std::vector<std::string> args) {
  args.insert(args.begin(), "gbmsim");
  std::vector<char *> argv;
  for (auto &a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = gbmcli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("gbm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string write(const std::string &name, const std::string &text) const {
    std::ofstream os(dir / name);
    os << text;
    return (dir / name).string();
  }

  static std::string slurp(const fs::path &p) {
    std::ifstream is(p);
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
  }

  fs::path dir;
};

std::vector<std::vector<std::string>> read_csv(const std::string &text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string> &header, const std::string &name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

const char *kSmallRun = R"([mesh]
nx = 8
ny = 8
[params]
kappa1 = 8e-5
kappa0 = 8e-5
rho = 1
alpha = 0.8
beta1 = 0.8
beta2 = 0.8
gamma = 0.008
delta = 0.8
[time]
dt = 0.01
Tf = 0.05
)";

} // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(gbmsim({}).code, gbmcli::kInputError);
  EXPECT_EQ(gbmsim({"frobnicate"}).code, gbmcli::kInputError);
  EXPECT_EQ(gbmsim({"--help"}).code, gbmcli::kSuccess);
  EXPECT_EQ(gbmsim({"run"}).code, gbmcli::kInputError);
  EXPECT_EQ(gbmsim({"run", "--preset", "nope"}).code, gbmcli::kInputError);
}

TEST_F(Cli, CheckMeshExitCodes) {
  const auto good = (dir / "good.mesh").string();
  gbm::write_mesh_file(good, gbm::build_structured_mesh(4, 4, 1.0, 1.0));
  EXPECT_EQ(gbmsim({"check-mesh", good}).code, gbmcli::kSuccess);

  const auto bad = write("obtuse.mesh", "3 1\n0 0\n1 0\n-1 1\n0 1 2\n");
  const auto r = gbmsim({"check-mesh", bad});
  EXPECT_EQ(r.code, gbmcli::kNumericalFailure);
  EXPECT_NE(r.err.find("element 0"), std::string::npos);

  EXPECT_EQ(gbmsim({"check-mesh", write("empty.mesh", "")}).code, gbmcli::kInputError);
  EXPECT_EQ(gbmsim({"check-mesh", (dir / "missing.mesh").string()}).code, gbmcli::kInputError);
}

TEST_F(Cli, RunConfigWritesOutputs) {
  const auto cfg = write("small.ini", kSmallRun);
  const auto out = (dir / "out").string();
  const auto r = gbmsim({"run", cfg, "--output-dir", out, "--snapshot-every", "5"});
  ASSERT_EQ(r.code, gbmcli::kSuccess) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "steps.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "snapshot_000005.vtk"));
  EXPECT_EQ(read_csv(slurp(dir / "out" / "steps.csv")).size(), 7u);
}

TEST_F(Cli, RunConfigErrors) {
  EXPECT_EQ(gbmsim({"run", (dir / "missing.ini").string()}).code, gbmcli::kInputError);
  const auto r = gbmsim({"run", write("bad.ini", "[params]\nrho = x\n")});
  EXPECT_EQ(r.code, gbmcli::kInputError);
  EXPECT_NE(r.err.find("bad.ini:2: params.rho"), std::string::npos);
  const auto obtuse = write("obtuse.mesh", "3 1\n0 0\n1 0\n-1 1\n0 1 2\n");
  const auto o = gbmsim({"run", write("obtuse.ini", "[mesh]\ntype = file\nfile = obtuse.mesh\n[params]\nkappa0 = 1\n[time]\ndt = 0.1\nTf = 0.1\n"),
                         "--output-dir", (dir / "o").string()});
  EXPECT_EQ(o.code, gbmcli::kInputError);
  EXPECT_NE(o.err.find("element 0"), std::string::npos);
  (void)obtuse;
}

TEST_F(Cli, NumericalFailureExitsOne) {
  const auto cfg = write("stiff.ini", std::string(kSmallRun) + "[solver]\nmaxit = 1\ntol = 1e-15\n");
  const auto r = gbmsim({"run", cfg, "--output-dir", (dir / "out").string()});
  EXPECT_EQ(r.code, gbmcli::kNumericalFailure);
  EXPECT_NE(r.err.find("step 1"), std::string::npos);
}

TEST_F(Cli, CompareIdenticalConfigsGivesZeroDifferences) {
  const auto cfg = write("small.ini", kSmallRun);
  const auto r = gbmsim({"compare", cfg, cfg});
  ASSERT_EQ(r.code, gbmcli::kSuccess) << r.err;
  const auto rows = read_csv(r.out);
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
      if (rows[0][i].ends_with("_diff")) EXPECT_EQ(rows[k][i], "0");
    }
  }
}

TEST_F(Cli, CompareRejectsDifferentGrids) {
  const auto a = write("a.ini", kSmallRun);
  const auto b = write("b.ini", std::string(kSmallRun) + "[scheme]\nvariant = explicit-lumped\n");
  std::string c_text = kSmallRun;
  c_text.replace(c_text.find("Tf = 0.05"), 9, "Tf = 0.06");
  const auto c = write("c.ini", c_text);
  EXPECT_EQ(gbmsim({"compare", a, b}).code, gbmcli::kSuccess);
  EXPECT_EQ(gbmsim({"compare", a, c}).code, gbmcli::kInputError);
}

TEST_F(Cli, LumpingPresetShowsConsistentMassUndershoot) {
  const auto r = gbmsim({"run", "--preset", "lumping-comparison", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, gbmcli::kSuccess) << r.err;
  const auto rows = read_csv(slurp(dir / "lumping-comparison" / "compare.csv"));
  const std::size_t a = column(rows[0], "minT_a");
  const std::size_t b = column(rows[0], "minT_b");
  bool lumped_negative = false;
  bool consistent_negative = false;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    lumped_negative = lumped_negative || std::stod(rows[k][a]) < 0.0;
    consistent_negative = consistent_negative || std::stod(rows[k][b]) < 0.0;
  }
  EXPECT_FALSE(lumped_negative);
  EXPECT_TRUE(consistent_negative);
  EXPECT_TRUE(fs::exists(dir / "lumping-comparison" / "lumping-imex-consistent" / "summary.json"));
}

TEST_F(Cli, BoundsPresetImexColumnStaysInBounds) {
  const auto r = gbmsim({"run", "--preset", "bounds-comparison", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, gbmcli::kSuccess) << r.err;
  const auto rows = read_csv(slurp(dir / "bounds-comparison" / "compare.csv"));
  ASSERT_EQ(rows.size(), 102u);
  const std::size_t lo = column(rows[0], "minT_a");
  const std::size_t hi = column(rows[0], "maxT_a");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_GE(std::stod(rows[k][lo]), 0.0);
    EXPECT_LE(std::stod(rows[k][hi]), 1.0);
  }
}

TEST_F(Cli, ExportedPresetReproducesPresetRun) {
  ASSERT_EQ(gbmsim({"export-preset", "lumping-comparison", (dir / "cfg").string()}).code, gbmcli::kSuccess);
  ASSERT_EQ(gbmsim({"run", "--preset", "lumping-comparison", "--output-dir", (dir / "p").string()}).code,
            gbmcli::kSuccess);
  ASSERT_EQ(gbmsim({"run", (dir / "cfg" / "lumping-imex-consistent.ini").string(), "--output-dir",
                    (dir / "f").string()})
                .code,
            gbmcli::kSuccess);
  EXPECT_EQ(slurp(dir / "p" / "lumping-comparison" / "lumping-imex-consistent" / "steps.csv"),
            slurp(dir / "f" / "steps.csv"));
}
