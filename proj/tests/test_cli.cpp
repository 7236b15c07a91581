#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result
{
  int status;
  std::string output;
};

std::string
slurp(const fs::path& p)
{
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("wavedens_cli_" + std::string(info->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  Result run(const std::string& args) const
  {
    const fs::path log = root_ / "cli.log";
    const std::string cmd =
      std::string("\"") + WAVEDENS_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return { WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(log) };
  }

  fs::path dir(const std::string& name) const { return root_ / name; }

  fs::path write(const std::string& name, const std::string& contents) const
  {
    const fs::path p = root_ / name;
    std::ofstream(p, std::ios::binary) << contents;
    return p;
  }

  fs::path root_;
};

std::size_t
data_rows(const std::string& csv)
{
  std::size_t lines = 0;
  for (char ch : csv)
    lines += ch == '\n' ? 1 : 0;
  return lines - 1;
}

const fs::path golden = WAVEDENS_GOLDEN_DIR;

} // namespace

TEST_F(Cli, EstimateIsByteIdenticalAcrossRuns)
{
  const auto input = golden / "durations.csv";
  const std::string common = "estimate --input \"" + input.string() + "\" --rescale 250";
  ASSERT_EQ(run("--out \"" + dir("a").string() + "\" " + common).status, 0);
  ASSERT_EQ(run("--out \"" + dir("b").string() + "\" " + common).status, 0);
  for (const char* f : { "estimate.json", "grid.csv", "manifest.json" })
    EXPECT_EQ(slurp(dir("a") / f), slurp(dir("b") / f)) << f;
}

TEST_F(Cli, EstimateMatchesGolden)
{
  const auto input = golden / "durations.csv";
  ASSERT_EQ(run("--out \"" + dir("a").string() + "\" estimate --input \"" + input.string() +
                "\" --rescale 250")
              .status,
            0);
  EXPECT_EQ(slurp(dir("a") / "estimate.json"), slurp(golden / "estimate.json"));
  EXPECT_EQ(slurp(dir("a") / "grid.csv"), slurp(golden / "grid.csv"));
}

TEST_F(Cli, RescaleDividesTheData)
{
  const auto input = golden / "durations.csv";
  ASSERT_EQ(run("--out \"" + dir("a").string() + "\" estimate --input \"" + input.string() +
                "\" --rescale 250 --basis haar")
              .status,
            0);
  const auto j = nlohmann::json::parse(slurp(dir("a") / "estimate.json"));
  // Haar father cells have unit width; rescaled durations lie in [0, 5).
  for (const auto& row : j.at("kept"))
    if (row.at(0).get<int>() == -1) {
      EXPECT_GE(row.at(1).get<int>(), 0);
      EXPECT_LT(row.at(1).get<int>(), 5);
    }
}

TEST_F(Cli, EnvironmentSetsDefaultOutput)
{
  const auto input = golden / "durations.csv";
  const std::string cmd = "WAVEDENS_OUT=\"" + dir("env").string() + "\" \"" +
                          std::string(WAVEDENS_CLI_PATH) + "\" sample --n 10 > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir("env") / "sample.csv"));
  EXPECT_TRUE(fs::exists(dir("env") / "manifest.json"));
}

TEST_F(Cli, EmptyFileFails)
{
  const auto empty = write("empty.csv", "");
  const auto r = run("--out \"" + dir("a").string() + "\" estimate --input \"" + empty.string() + "\"");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("at least 2"), std::string::npos) << r.output;
}

TEST_F(Cli, MalformedLineIsReported)
{
  const auto bad = write("bad.csv", "1.0\n2.5\nx7\n");
  const auto r = run("--out \"" + dir("a").string() + "\" estimate --input \"" + bad.string() + "\"");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("line 3"), std::string::npos) << r.output;
  const auto missing = run("--out \"" + dir("a").string() + "\" estimate --input /nonexistent.csv");
  EXPECT_NE(missing.status, 0);
}

TEST_F(Cli, BadFlagsFail)
{
  EXPECT_NE(run("estimate --input x.csv --mode hard").status, 0);
  EXPECT_NE(run("calibrate --gammas 1:0:0.5").status, 0);
  EXPECT_NE(run("calibrate --signal nope").status, 0);
  EXPECT_NE(run("bogus").status, 0);
}

TEST_F(Cli, UnknownMethodListsValidOnes)
{
  const auto r = run("--out \"" + dir("a").string() + "\" bench --methods S,Z --values 10");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("S, H, S*, K"), std::string::npos) << r.output;
}

TEST_F(Cli, SingleBenchRunEmitsOneIse)
{
  ASSERT_EQ(
    run("--out \"" + dir("a").string() + "\" bench --methods S --values 10 --reps 1 --n 256")
      .status,
    0);
  EXPECT_EQ(data_rows(slurp(dir("a") / "replications.csv")), 1u);
  EXPECT_EQ(data_rows(slurp(dir("a") / "plot.csv")), 1u);
}

TEST_F(Cli, SingleCalibrationRow)
{
  ASSERT_EQ(run("--out \"" + dir("a").string() +
                "\" calibrate --signal uniform --basis haar --n 256 --gammas 1.5 --reps 1")
              .status,
            0);
  EXPECT_EQ(data_rows(slurp(dir("a") / "replications.csv")), 1u);
  EXPECT_EQ(data_rows(slurp(dir("a") / "plot.csv")), 1u);
}

TEST_F(Cli, CalibrationIndependentOfWorkers)
{
  const std::string args = " calibrate --signal gauss --basis spline --n 256 --gammas 0.5:1.5:0.5 --reps 4";
  ASSERT_EQ(run("--workers 1 --out \"" + dir("a").string() + "\"" + args).status, 0);
  ASSERT_EQ(run("--workers 3 --out \"" + dir("b").string() + "\"" + args).status, 0);
  for (const char* f : { "replications.csv", "plot.csv", "summary.json", "manifest.json" })
    EXPECT_EQ(slurp(dir("a") / f), slurp(dir("b") / f)) << f;
  const auto m = nlohmann::json::parse(slurp(dir("a") / "manifest.json"));
  EXPECT_EQ(m.at("config").at("gammas"), nlohmann::json({ 0.5, 1.0, 1.5 }));
  EXPECT_EQ(m.at("config").at("seed"), 1);
}

TEST_F(Cli, ReplayReproducesRun)
{
  ASSERT_EQ(run("--out \"" + dir("a").string() +
                "\" bench --sweep tail --values 2,8 --methods H,K --reps 2 --n 200 --seed 5")
              .status,
            0);
  ASSERT_EQ(run("--out \"" + dir("b").string() + "\" replay \"" +
                (dir("a") / "manifest.json").string() + "\"")
              .status,
            0);
  for (const char* f : { "replications.csv", "plot.csv", "summary.json", "manifest.json" })
    EXPECT_EQ(slurp(dir("a") / f), slurp(dir("b") / f)) << f;
}

TEST_F(Cli, BenchMatchesGolden)
{
  ASSERT_EQ(run("--out \"" + dir("a").string() +
                "\" bench --sweep support --values 10,70 --methods S,H,S*,K --reps 3 --n 256 --seed 7")
              .status,
            0);
  EXPECT_EQ(slurp(dir("a") / "plot.csv"), slurp(golden / "bench_plot.csv"));
  EXPECT_EQ(slurp(dir("a") / "replications.csv"), slurp(golden / "bench_replications.csv"));
}

TEST_F(Cli, SampleExportRoundTripsThroughEstimate)
{
  ASSERT_EQ(run("--out \"" + dir("s").string() + "\" sample --signal bumps --n 500 --seed 3").status, 0);
  ASSERT_EQ(run("--out \"" + dir("e").string() + "\" estimate --input \"" +
                (dir("s") / "sample.csv").string() + "\" --mode theoretical --gamma 1.2")
              .status,
            0);
  const auto j = nlohmann::json::parse(slurp(dir("e") / "estimate.json"));
  EXPECT_EQ(j.at("n"), 500);
  EXPECT_EQ(j.at("mode").at("name"), "theoretical");
  EXPECT_FALSE(j.at("positive_part").get<bool>());
}
