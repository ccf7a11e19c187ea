#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "stabkit/io.hpp"
#include "stabkit/scenarios.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "stabkit_cli_test";

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  fs::create_directories(work);
  const auto log = work / "stdout.txt";
  const std::string cmd =
      std::string("cd '") + work.string() + "' && '" + STABKIT_CLI_PATH + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = stabkit::io::read_text(log.string());
  return r;
}

}  // namespace

TEST(Cli, RunPassingScenarioExitsZero) {
  const auto r = cli("run fig1 --out fig1");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(work / "fig1" / "summary.json"));
  EXPECT_TRUE(fs::exists(work / "fig1" / "trajectory.svg"));
}

TEST(Cli, RunDefaultOutputDirectory) {
  fs::remove_all(work / "stabkit-out");
  EXPECT_EQ(cli("run ex4-nonuniformity").code, 0);
  EXPECT_TRUE(fs::exists(work / "stabkit-out" / "ex4-nonuniformity" / "settling.csv"));
}

TEST(Cli, RunFailingAssertionExitsOne) {
  const auto r = cli("run fig1 --set d_amplitude=2 --set horizon=200 --out fig1-bad");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_TRUE(fs::exists(work / "fig1-bad" / "summary.json"));
}

TEST(Cli, CertifyExitCodes) {
  const auto ok = cli("certify eq24");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("no-violation-found"), std::string::npos);
  const auto bad = cli("certify eq24 --set param.k=0.2 --report k02.json");
  EXPECT_EQ(bad.code, 1) << bad.out;
  const auto j = nlohmann::json::parse(stabkit::io::read_text((work / "k02.json").string()));
  EXPECT_EQ(j["verdict"], "violated");
  EXPECT_FALSE(j["witnesses"].empty());
}

TEST(Cli, CertifyFromFile) {
  stabkit::io::write_text((work / "eq57.cfg").string(), stabkit::find_builtin_certificate("eq57")->config);
  EXPECT_EQ(cli("certify eq57.cfg").code, 0);
  stabkit::io::write_text((work / "broken.cfg").string(), "kind = ugaos\nsystem = eq24\nbogus = 1\n");
  EXPECT_EQ(cli("certify broken.cfg").code, 2);
}

TEST(Cli, UsageAndConfigErrorsExitTwo) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("run").code, 2);
  EXPECT_EQ(cli("run no-such-scenario").code, 2);
  EXPECT_EQ(cli("run fig1 --set nonsense=1 --out x").code, 2);
  EXPECT_EQ(cli("run fig1 --set horizon=abc --out x").code, 2);
  EXPECT_EQ(cli("certify no-such-certificate").code, 2);
  EXPECT_EQ(cli("certify eq24 --set typo.key=1").code, 2);
  EXPECT_EQ(cli("plot missing.csv").code, 2);
}

TEST(Cli, PlotCommand) {
  stabkit::io::write_text((work / "empty.csv").string(), "t,x1,y1\n");
  EXPECT_EQ(cli("plot empty.csv").code, 2);
  EXPECT_FALSE(fs::exists(work / "empty.svg"));
  ASSERT_EQ(cli("run ex4-nonuniformity --out nu").code, 0);
  EXPECT_EQ(cli("plot nu/settling.csv --out curve.svg").code, 0);
  EXPECT_TRUE(fs::exists(work / "curve.svg"));
  EXPECT_EQ(cli("plot nu/settling.csv --style states").code, 2);
  EXPECT_EQ(cli("plot nu/settling.csv --style bars").code, 2);
}

TEST(Cli, Listings) {
  const auto s = cli("list-scenarios");
  EXPECT_EQ(s.code, 0);
  for (const auto& info : stabkit::scenario_catalogue()) EXPECT_NE(s.out.find(info.id), std::string::npos) << info.id;
  const auto sys = cli("list-systems");
  EXPECT_EQ(sys.code, 0);
  for (const char* id : {"eq8", "eq20", "eq24", "eq57", "eq73", "eq111", "eq121", "eq126", "eq129"})
    EXPECT_NE(sys.out.find(id), std::string::npos) << id;
  EXPECT_EQ(cli("--help").code, 0);
}
