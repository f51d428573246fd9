#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"

using namespace catbranch::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "catbranch");
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("catbranch_test_" + name);
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST(Config, StrictParsing) {
  EXPECT_THROW(RunConfig::parse("[model]\nbogus = 1\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[nowhere]\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[model]\nn = 3\nn = 4\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[model]\nn =\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[model]\njust words\n", "t"), ConfigError);
  auto c = RunConfig::parse("seed = 9 # trailing\n; comment\n[model]\nn = 12\n[sim]\nzero_noise = true\n", "t");
  EXPECT_EQ(c.get_u64("", "seed", 0), 9u);
  EXPECT_EQ(c.get_int("model", "n", 1), 12);
  EXPECT_TRUE(c.get_bool("sim", "zero_noise", false));
  EXPECT_THROW(c.get_double("model", "n_typo", 0.0), ConfigError);
  EXPECT_THROW(RunConfig::parse("[model]\nn = twelve\n", "t").get_int("model", "n", 1), ConfigError);
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    RunConfig::parse("[model]\nn = 3\n\nwat = 1\n", "cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg:4"), std::string::npos) << e.what();
  }
}

TEST(Cli, UnknownOptionIsUsageError) {
  const auto r = run({"params", "check", "--bogus"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("usage error"), std::string::npos);
  EXPECT_EQ(run({}).code, kExitValidation);
}

TEST(Cli, DefaultParamsPass) {
  const auto r = run({"params", "check", "--no-timestamp"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("# catbranch ", 0), 0u);
  EXPECT_NE(r.out.find("# config_hash: fnv1a64:"), std::string::npos);
  EXPECT_EQ(r.out.find("# timestamp"), std::string::npos);
}

TEST(Cli, DegenerateCatalystLawExitsWithValidationError) {
  const auto path = write_temp("delta1.cfg", "[model]\npmf1 = 1:1\n");
  const auto r = run({"params", "check", "--config", path});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("alpha"), std::string::npos) << r.err;
}

TEST(Cli, MissingConfigFileIsValidationError) {
  const auto r = run({"params", "check", "--config", "/nonexistent/x.cfg"});
  EXPECT_EQ(r.code, kExitValidation) << r.err;
}

TEST(Cli, SimulationIsDeterministicWithoutTimestamp) {
  const std::vector<std::string> a{"simulate", "bp", "--seed", "77", "--reps", "3", "--no-timestamp"};
  const auto r1 = run(a), r2 = run(a);
  ASSERT_EQ(r1.code, kExitOk) << r1.err;
  EXPECT_EQ(r1.out, r2.out);
  const auto r3 = run({"simulate", "bp", "--seed", "78", "--reps", "3", "--no-timestamp"});
  EXPECT_NE(r1.out, r3.out);
  EXPECT_NE(r1.out.find("rep,t,x,y,z,eta_hat"), std::string::npos) << r1.out.substr(0, 400);
}

TEST(Cli, ScalarAndAvx2OutputsMatch) {
  const auto s = run({"simulate", "sde", "--seed", "5", "--reps", "4", "--no-timestamp", "--isa", "scalar"});
  const auto v = run({"simulate", "sde", "--seed", "5", "--reps", "4", "--no-timestamp", "--isa", "avx2"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  if (v.code == kExitOk) EXPECT_EQ(s.out, v.out);
}

TEST(Cli, EcheverriaPassesAndJsonParses) {
  const auto r = run({"verify", "echeverria", "--format", "json", "--no-timestamp"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("meta"));
  EXPECT_EQ(j["reports"][0]["study"], "echeverria");
}

TEST(Cli, StationarySampleIsBare) {
  const auto path = write_temp("count.cfg", "[sim]\ncount = 5\n");
  const auto r = run({"stationary", "sample", "--config", path, "--no-timestamp"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream is(r.out);
  std::string line;
  int values = 0;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') {
      EXPECT_GE(std::stod(line), 1.0);
      ++values;
    }
  EXPECT_EQ(values, 5);
}

TEST(Cli, OutputFileOption) {
  const fs::path p = fs::temp_directory_path() / "catbranch_test_table.csv";
  const auto r = run({"stationary", "table", "--out", p.string(), "--no-timestamp"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_NE(ss.str().find("x,pdf,cdf"), std::string::npos);
}
