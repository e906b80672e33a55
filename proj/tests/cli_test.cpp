#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sheafss");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sheafss::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kTorus = fixtures::data_path("torus.json");
const std::string kInjectiveMiddle = fixtures::data_path("injective_middle.json");
const std::string kPseudocircle = fixtures::data_path("pseudocircle.json");

}  // namespace

TEST(Cli, LerayOnTorus) {
  const Result r = run({"leray", kTorus, "--map", "pr1", "--sheaf", "k"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "q=1 | 1 1\nq=0 | 1 1\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "degenerates at E2"));
  EXPECT_TRUE(contains(r.out, "H^1 = 2"));
}

TEST(Cli, VerifyMainOnInjectiveMiddle) {
  const Result r = run({"verify-main", kInjectiveMiddle, "--map", "pr1", "--sequence", "inj"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t passes = 0;
  while (std::getline(lines, line)) passes += contains(line, "PASS");
  EXPECT_EQ(passes, 3u) << r.out;
  EXPECT_FALSE(contains(r.out, "FAIL"));
}

TEST(Cli, VerifyAcyclicMiddle) {
  EXPECT_EQ(run({"verify-cz", kInjectiveMiddle, "--map", "pr1", "--sequence", "inj"}).code, 0);
  const Result bad = run({"verify-cz", kPseudocircle, "--map", "collapse", "--sequence", "open_closed"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_TRUE(contains(bad.err, "{a,b,c,d}")) << bad.err;
}

TEST(Cli, SelftestPasses) {
  const Result r = run({"selftest", "--seed", "7", "--count", "25"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "25/25 PASS")) << r.out;
}

TEST(Cli, CartanEilenbergReport) {
  const Result r = run({"ce", kPseudocircle, "--sequence", "inj"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "19/19"));
  EXPECT_FALSE(contains(r.out, "FAIL"));
}

TEST(Cli, ReportFormatIsJson) {
  const Result r = run({"--format", "report", "cohomology", kPseudocircle, "--sheaf", "k"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("dims").at(0), 1);
  EXPECT_EQ(j.at("dims").at(1), 1);
}

TEST(Cli, FieldOverride) {
  const Result r = run({"--field", "fp:5", "cohomology", kPseudocircle, "--sheaf", "mobius"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "H^0 = 0"));
  EXPECT_TRUE(contains(r.out, "H^1 = 0"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"validate", kTorus}).code, 0);
  EXPECT_EQ(run({"validate", "/nonexistent/file.json"}).code, 2);
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"--format", "xml", "validate", kTorus}).code, 0);
  EXPECT_EQ(run({"cohomology", kTorus, "--sheaf", "missing"}).code, 2);
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"gss", kTorus, "--map", "pr2", "--sheaf", "k"};
  const Result a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const std::vector<std::string> seeded{"--seed", "3", "delta", kTorus, "--map", "pr1", "--sequence", "inj"};
  EXPECT_EQ(run(seeded).out, run(seeded).out);
}

TEST(Cli, ForgeMatchesGoldenAndValidates) {
  const Result r = run({"forge", "--seed", "2024"});
  ASSERT_EQ(r.code, 0);
  const std::string golden = fixtures::golden_path("forge_2024.json");
  if (std::getenv("SHEAFSS_UPDATE_GOLDEN") != nullptr) std::ofstream(golden) << r.out;
  EXPECT_EQ(r.out, read_file(golden));
  const std::string path = (std::filesystem::temp_directory_path() / "sheafss_forge_2024.json").string();
  ASSERT_EQ(run({"forge", "--seed", "2024", "-o", path}).code, 0);
  EXPECT_EQ(read_file(path), r.out);
  EXPECT_EQ(run({"validate", path}).code, 0);
  std::filesystem::remove(path);
}
