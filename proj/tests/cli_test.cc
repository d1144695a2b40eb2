#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sigmak/cli.h"
#include "sigmak/report.h"

namespace {

namespace fs = std::filesystem;
using sigmak::json;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sigmak");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sigmak::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> lines(const std::string& s) {
  std::vector<json> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sigmak_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(NRange, Parses) {
  EXPECT_EQ(sigmak::parse_n_range("5"), std::make_pair(5, 5));
  EXPECT_EQ(sigmak::parse_n_range("5..7"), std::make_pair(5, 7));
  EXPECT_THROW(sigmak::parse_n_range("7..5"), sigmak::invalid_input);
  EXPECT_THROW(sigmak::parse_n_range("1"), sigmak::invalid_input);
  EXPECT_THROW(sigmak::parse_n_range("5..x"), sigmak::invalid_input);
  EXPECT_THROW(sigmak::parse_n_range(""), sigmak::invalid_input);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"verify", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"verify", "--n", "x"}).code, 2);
  EXPECT_EQ(cli({"verify", "--only", "no_such_check"}).code, 2);
  EXPECT_EQ(cli({"verify", "--only", "C3_1_key", "--n", "5", "--k", "1"}).code, 2);
  EXPECT_EQ(cli({"threshold", "--id", "no_such_check"}).code, 2);
  EXPECT_EQ(cli({"replay", scratch("missing.json").string()}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"--version"}).code, 0);
}

TEST(Cli, VerifySingleCheck) {
  const CliRun r = cli({"verify", "--only", "newton", "--n", "6", "--samples", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = lines(r.out);
  ASSERT_EQ(v.size(), 1u);
  for (const char* f : {"schema_version", "id", "kind", "n", "k", "samples", "min_slack", "verdict",
                        "seed", "witness"}) {
    EXPECT_TRUE(v[0].contains(f)) << f;
  }
  EXPECT_EQ(v[0]["id"], "newton");
  EXPECT_EQ(v[0]["n"], 6);
  EXPECT_EQ(v[0]["k"], 4);
  EXPECT_EQ(v[0]["verdict"], "PASS");
  EXPECT_EQ(v[0]["schema_version"], sigmak::kSchemaVersion);
  EXPECT_NE(r.err.find("newton"), std::string::npos);
}

TEST(Cli, VerifyKeySweep) {
  const CliRun r = cli({"verify", "--only", "C3_1_key", "--n", "5", "--k", "3", "--kappa1", "1e4",
                     "--K", "1e3", "--samples", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = lines(r.out);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0]["kind"], "ASYMPTOTIC");
  ASSERT_EQ(v[0]["sweep"].size(), 1u);
  EXPECT_EQ(v[0]["sweep"][0]["kappa1"], 1e4);
  EXPECT_EQ(v[0]["sweep"][0]["K"], 1e3);
}

TEST(Cli, GatedFailureExitsOne) {
  // A negative tolerance demands slack >= 1, which no identity meets.
  const CliRun r =
      cli({"verify", "--only", "L5_1_identity", "--n", "5", "--samples", "20", "--tol", "-1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(lines(r.out)[0]["verdict"], "FAIL");
}

TEST(Cli, ManifestReplaysIdentically) {
  const fs::path out = scratch("report.jsonl");
  const CliRun r = cli({"verify", "--only", "maclaurin,L5_6_psd,L3_2", "--n", "5..6", "--samples",
                     "300", "--seed", "7", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path man = out.string() + ".manifest.json";
  ASSERT_TRUE(fs::exists(man));
  json m;
  std::ifstream(man) >> m;
  EXPECT_EQ(m["command"], "verify");
  EXPECT_EQ(m["seed"], 7);
  EXPECT_EQ(m["results"].size(), lines([&] {
              std::ifstream in(out);
              return std::string(std::istreambuf_iterator<char>(in), {});
            }())
                                      .size());

  const CliRun again = cli({"replay", man.string()});
  EXPECT_EQ(again.code, 0) << again.out;
  EXPECT_NE(again.out.find("replay identical"), std::string::npos);
  const CliRun threaded = cli({"replay", man.string(), "--jobs", "3"});
  EXPECT_EQ(threaded.code, 0) << threaded.out;

  // A perturbed recorded value must be caught.
  m["results"][0]["min_slack"] = m["results"][0]["min_slack"].get<double>() * (1 + 1e-15) + 1e-300;
  const fs::path bad = scratch("tampered.manifest.json");
  std::ofstream(bad) << m.dump();
  const CliRun diff = cli({"replay", bad.string()});
  EXPECT_EQ(diff.code, 1);
  EXPECT_NE(diff.out.find("DIFF"), std::string::npos);
}

TEST(Cli, SearchWritesRankedWitnesses) {
  const CliRun r = cli({"search", "--n", "5", "--k", "3", "--i", "1", "--restarts", "4",
                     "--max-iters", "100", "--keep", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = lines(r.out);
  ASSERT_FALSE(v.empty());
  EXPECT_LE(v.size(), 3u);
  EXPECT_EQ(v[0]["rank"], 0);
  EXPECT_TRUE(v[0].contains("lambda_min"));
  EXPECT_TRUE(v[0].contains("kappa"));
}

TEST(Cli, SearchInfeasibleExitsTwo) {
  // Three entries near kappa_1 = 1e4 force sigma_2 far above 1.
  const CliRun r = cli({"search", "--n", "3", "--k", "2", "--i", "2", "--sigma-lo", "1", "--sigma-hi",
                     "1", "--restarts", "2"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, ThresholdRecord) {
  const CliRun r = cli({"threshold", "--id", "L3_2", "--n", "5", "--samples", "50", "--lo", "1e5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = lines(r.out);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0]["id"], "L3_2");
  EXPECT_TRUE(v[0].contains("kappa1_star"));
}

TEST(Cli, List) {
  const CliRun r = cli({"list", "--n", "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("C3_1_key"), std::string::npos);
}

}  // namespace
