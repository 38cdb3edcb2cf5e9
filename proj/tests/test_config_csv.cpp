#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bnsf/config.hpp"
#include "bnsf/csv.hpp"

using namespace bnsf;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.ini");
}

std::string error_of(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  EXPECT_NO_THROW(RunConfig{}.validate());
  EXPECT_EQ(parse(""), RunConfig{});
}

TEST(Config, EchoRoundTrips) {
  RunConfig c;
  c.gas.gamma = 1.3;
  c.eps = 0.1 / 3.0;
  c.nu_list = {0.5, 0.25, 1.0 / 7.0};
  c.seed = 42;
  c.out_dir = "results/a";
  EXPECT_EQ(parse(to_ini(c)), c);
}

TEST(Config, ParsesSectionsAndLists) {
  const auto c = parse("[gas]\ngamma = 1.67\n[sweep]\nnu_list = 0.4, 0.2 ,0.1\n[grid]\nN = 2048\n");
  EXPECT_DOUBLE_EQ(c.gas.gamma, 1.67);
  EXPECT_EQ(c.nu_list, (std::vector<double>{0.4, 0.2, 0.1}));
  EXPECT_EQ(c.N, 2048);
}

TEST(Config, ValidationNamesTheViolatedConstraint) {
  EXPECT_NE(error_of("[gas]\ngamma = 0.5\n").find("gamma>1"), std::string::npos);
  EXPECT_NE(error_of("[grid]\ncfl = 1.5\n").find("cfl"), std::string::npos);
  EXPECT_NE(error_of("[sweep]\nnu_list = 0.1, 0.2\n").find("decreasing"), std::string::npos);
  EXPECT_NE(error_of("[shock]\nfamily = 2\n").find("family"), std::string::npos);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_NE(error_of("[gas]\ngama = 1.4\n").find("unknown key 'gas.gama'"), std::string::npos);
  EXPECT_NE(error_of("[grid]\nN = 12.5\n").find("expected an integer"), std::string::npos);
  EXPECT_NE(error_of("[run]\nT = fast\n").find("expected a number"), std::string::npos);
  EXPECT_NE(error_of("[verify]\nseed = -1\n").find("nonnegative"), std::string::npos);
}

TEST(Config, SyntaxErrorCarriesLine) {
  EXPECT_NE(error_of("[gas]\nR = 1\nthis line is broken\n").find("test.ini:3"), std::string::npos);
}

TEST(Config, EnvironmentOverrides) {
  ::setenv("BNSFTEST_GAS_GAMMA", "1.25", 1);
  ::setenv("BNSFTEST_SWEEP_NU_LIST", "0.3,0.15", 1);
  RunConfig c;
  apply_env_overrides(c, "BNSFTEST_");
  ::unsetenv("BNSFTEST_GAS_GAMMA");
  ::unsetenv("BNSFTEST_SWEEP_NU_LIST");
  EXPECT_DOUBLE_EQ(c.gas.gamma, 1.25);
  EXPECT_EQ(c.nu_list, (std::vector<double>{0.3, 0.15}));
  ::setenv("BNSFTEST_GRID_N", "many", 1);
  EXPECT_THROW(apply_env_overrides(c, "BNSFTEST_"), ConfigError);
  ::unsetenv("BNSFTEST_GRID_N");
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.36342189215581552187}) {
    const auto s = CsvWriter::format(x);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), x) << s;
  }
  EXPECT_EQ(CsvWriter::format(7L), "7");
  EXPECT_EQ(CsvWriter::format(std::string("valid")), "valid");
}

TEST(Csv, WritesHeaderRowsAndIsDeterministic) {
  const auto dir = std::filesystem::temp_directory_path() / "bnsf_csv_test";
  std::filesystem::create_directories(dir);
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  for (const auto& p : {a, b}) {
    CsvWriter w(p, {"t", "x", "label"});
    w.row({0.5, 1.0 / 3.0, std::string("ok")});
    w.row({1.0, -1e-20, std::string("ok")});
    EXPECT_THROW(w.row({1.0}), std::invalid_argument);
  }
  EXPECT_EQ(slurp(a), "t,x,label\n0.5,0.33333333333333331,ok\n1,-9.9999999999999995e-21,ok\n");
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_THROW(CsvWriter((dir / "missing" / "c.csv").string(), {"t"}), std::runtime_error);
  std::filesystem::remove_all(dir);
}
