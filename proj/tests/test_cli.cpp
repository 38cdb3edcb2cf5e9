#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "bnsf_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const auto p = kRoot / name;
  std::ofstream(p) << text;
  return p;
}

/// Exit status of the CLI; stdout and stderr go to kRoot/log.txt.
int run(const std::string& args, const std::string& env = "") {
  fs::create_directories(kRoot);
  const std::string cmd = env + " \"" BNSF_CLI_PATH "\" " + args + " > \"" + (kRoot / "log.txt").string() + "\" 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string log_text() { return slurp(kRoot / "log.txt"); }

const char* kSmall = "[grid]\nN = 256\n[run]\nT = 0.3\n";

}  // namespace

TEST(Cli, InvalidConfigExitsTwo) {
  const auto c = write_config("bad.ini", "[gas]\ngamma = 0.5\n");
  EXPECT_EQ(run("--config " + c.string() + " profile"), 2);
  EXPECT_NE(log_text().find("gamma>1"), std::string::npos);
  EXPECT_EQ(run("--config " + write_config("typo.ini", "[gas]\ngama = 2\n").string() + " profile"), 2);
  EXPECT_EQ(run("profile", "BNSF_GAS_GAMMA=0.5"), 2);
  EXPECT_EQ(run("--config /nonexistent.ini profile"), 2);
  EXPECT_EQ(run("--threads 0 profile"), 2);
}

TEST(Cli, ProfileWritesOutputs) {
  const auto out = kRoot / "profile";
  fs::remove_all(out);
  ASSERT_EQ(run("--out " + out.string() + " profile"), 0) << log_text();
  EXPECT_NE(log_text().find("verdict: valid"), std::string::npos);
  for (const char* f : {"profile.csv", "tail_report.csv", "summary_profile.txt"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(slurp(out / "profile.csv").substr(0, 32), "xi,v,u,theta,v_xi,u_xi,theta_xi\n");
}

TEST(Cli, ContractIsDeterministic) {
  const auto c = write_config("small.ini", kSmall);
  const auto a = kRoot / "det_a", b = kRoot / "det_b";
  ASSERT_EQ(run("--config " + c.string() + " --out " + a.string() + " contract"), 0) << log_text();
  ASSERT_EQ(run("--config " + c.string() + " --out " + b.string() + " contract"), 0) << log_text();
  const auto ta = slurp(a / "trajectory.csv");
  EXPECT_GT(ta.size(), 100u);
  EXPECT_EQ(ta, slurp(b / "trajectory.csv"));
}

TEST(Cli, ZeroEnergyIsContractive) {
  const auto c = write_config("zero.ini", std::string(kSmall) + "E0 = 0\n");
  EXPECT_EQ(run("--config " + c.string() + " --out " + (kRoot / "zero").string() + " contract"), 0);
  EXPECT_NE(log_text().find("verdict: contractive"), std::string::npos);
}

TEST(Cli, ConfigEchoReparses) {
  const auto c = write_config("echo.ini", "[gas]\ngamma = 1.3\n[sweep]\nnu_list = 0.3, 0.1\n");
  const auto out = kRoot / "echo";
  ASSERT_EQ(run("--config " + c.string() + " --out " + out.string() + " profile"), 0) << log_text();
  const auto s1 = slurp(out / "summary_profile.txt");
  const auto pos = s1.find("# config\n");
  ASSERT_NE(pos, std::string::npos);
  const auto echo = write_config("echo2.ini", s1.substr(pos + 9));
  ASSERT_EQ(run("--config " + echo.string() + " profile"), 0) << log_text();
  const auto s2 = slurp(out / "summary_profile.txt");
  EXPECT_EQ(s1.substr(pos), s2.substr(s2.find("# config\n")));
  EXPECT_NE(s1.find("gamma = 1.3"), std::string::npos);
}

TEST(Cli, SeedFlagOverridesConfig) {
  const auto out = kRoot / "seed";
  ASSERT_EQ(run("--seed 17 --out " + out.string() + " profile"), 0) << log_text();
  EXPECT_NE(slurp(out / "summary_profile.txt").find("seed = 17"), std::string::npos);
}
