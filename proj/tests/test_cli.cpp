#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const std::string kBin = WUPD_BIN;
const fs::path kConfigs = WUPD_CONFIG_DIR;

struct Run {
  int status;
  std::string out;
};

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / ("wupd_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const std::string cmd = kBin + " " + args + " > " + out.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out)};
}

fs::path write(const std::string& name, const std::string& content) {
  const auto p = scratch() / name;
  std::ofstream(p) << content;
  return p;
}

TEST(Cli, SimulateIsByteIdentical) {
  const auto dir = scratch();
  const auto cfg = (kConfigs / "coin_underweighted.json").string();
  ASSERT_EQ(run("simulate -c " + cfg + " --csv " + (dir / "a.csv").string() + " --json " +
                (dir / "a.json").string())
                .status,
            0);
  ASSERT_EQ(run("simulate -c " + cfg + " --csv " + (dir / "b.csv").string() + " --json " +
                (dir / "b.json").string())
                .status,
            0);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_FALSE(slurp(dir / "a.csv").empty());
}

TEST(Cli, SimulateWritesCsvToStdout) {
  const auto r = run("simulate -c " + (kConfigs / "preset_recency.json").string());
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("step,observation,posterior_mean", 0), 0u);
}

TEST(Cli, UpdatePrintsSummary) {
  const auto r = run("update -c " + (kConfigs / "preset_base_rate_neglect.json").string());
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["alpha"].get<double>(), 0.3);
  EXPECT_GT(j["posterior"]["mean"].get<double>(), 0.1);
}

TEST(Cli, InvalidConfigExitsTwo) {
  const auto bad = write("bad.json", R"({"prior": {"family": "beta", "a": 1, "b": 1}, "likelihod": {}})");
  EXPECT_EQ(run("simulate -c " + bad.string()).status, 2);
  EXPECT_EQ(run("simulate -c " + (scratch() / "missing.json").string()).status, 2);
  const auto broken = write("broken.json", "{not json");
  EXPECT_EQ(run("update -c " + broken.string()).status, 2);
  EXPECT_EQ(run("simulate").status, 2);
}

TEST(Cli, UnwritableOutputExitsTwo) {
  EXPECT_EQ(run("simulate -c " + (kConfigs / "coin_bayes.json").string() + " --csv /nonexistent/dir/x.csv").status,
            2);
}

TEST(Cli, VerifyPassesAndFailsOnCorruption) {
  const auto ok = run("verify --seed 42 --trials 100");
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.out.find("all checks passed"), std::string::npos);
  EXPECT_NE(ok.out.find("100/100"), std::string::npos);
  const auto bad = run("verify --seed 42 --trials 10 --corrupt");
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.out.find("--replay"), std::string::npos);
  EXPECT_EQ(run("verify --trials 0").status, 2);
}

TEST(Cli, AnalyzeReportsBounds) {
  const auto r = run("analyze -c " + (kConfigs / "analyze_discrete.json").string());
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["relation"], "MonotoneDispersion");
  EXPECT_NEAR(j["bounds"]["b"].get<double>(), 0.32, 1e-15);
}

TEST(Cli, FitRecoversWeights) {
  const auto r = run("fit -i " + (kConfigs / "fit_point_beliefs.json").string() + " --search-box 0.05,5,0.05,5");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["alpha_hat"].get<double>(), 1.5, 0.1);
  EXPECT_NEAR(j["beta_hat"].get<double>(), 0.7, 0.1);
}

TEST(Cli, FitExitCodes) {
  const auto input = (kConfigs / "fit_point_beliefs.json").string();
  EXPECT_EQ(run("fit -i " + input + " --search-box 2,1,0.1,1").status, 2);
  EXPECT_EQ(run("fit -i " + input + " --search-box nonsense").status, 2);
  const auto tiny = write("tiny.json", R"({
    "prior": {"family": "beta", "a": 1, "b": 1},
    "likelihood": {"family": "bernoulli"},
    "observations": [1],
    "reports": {"kind": "point_beliefs", "values": [[1, 0.6]]}
  })");
  EXPECT_EQ(run("fit -i " + tiny.string()).status, 1);
}

TEST(Cli, GridPointsEnvironmentOverride) {
  const auto cfg = write("nogrid.json", R"({
    "prior": {"family": "beta", "a": 2, "b": 2},
    "likelihood": {"family": "bernoulli"},
    "observations": [1, 0]
  })");
  const auto r = run("simulate -c " + cfg.string() + " --json " + (scratch() / "g.json").string());
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(scratch() / "g.json"))["grid"]["points"], 2001);
  const std::string env = "WUPD_GRID_POINTS=257 ";
  const std::string cmd = env + kBin + " simulate -c " + cfg.string() + " --json " +
                          (scratch() / "h.json").string() + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(scratch() / "h.json"))["grid"]["points"], 257);
}

TEST(Cli, ShippedConfigsRun) {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    const auto name = entry.path().filename().string();
    if (entry.path().extension() != ".json") continue;
    std::string cmd = "simulate -c ";
    if (name.rfind("analyze_", 0) == 0) cmd = "analyze -c ";
    if (name.rfind("fit_", 0) == 0) cmd = "fit -i ";
    EXPECT_EQ(run(cmd + entry.path().string()).status, 0) << name;
    ++seen;
  }
  EXPECT_GE(seen, 10u);
}

}  // namespace
