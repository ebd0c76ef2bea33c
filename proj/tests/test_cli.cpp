#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using combwalk::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "combwalk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("combwalk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const nlohmann::json& j) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << j.dump(2);
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

nlohmann::json gr_config(int replicas) {
  return {{"schema", 1},
          {"profile", {{"family", "constant"}, {"params", {{"a", 0}}}}},
          {"estimator", {{"kind", "GamblerRuin"}, {"v", 3}}},
          {"replicas", replicas},
          {"master_seed", 5}};
}

}  // namespace

TEST(Cli, ClassifyExamples) {
  auto r = call({"classify", "--family", "nlogn"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("InfiniteCollision_Thm1_1"), std::string::npos);
  r = call({"classify", "--family", "linlog", "--beta", "3"});
  EXPECT_NE(r.out.find("FiniteCollision_Thm4_1"), std::string::npos);
  r = call({"classify", "--family", "linlog", "--beta", "1.5"});
  EXPECT_NE(r.out.find("Unknown"), std::string::npos);
  r = call({"classify", "--family", "constant", "--a", "5", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("reciprocal_partial_sum").at("1000").get<double>(), 200.0, 1e-9);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"classify", "--family", "cubic"}).code, 2);
  EXPECT_EQ(call({"acceptance", "medium"}).code, 2);
  EXPECT_EQ(call({"estimate", "--config", "/nonexistent/config.json"}).code, 2);
}

TEST_F(CliFiles, MalformedJsonIsUsageError) {
  const auto p = path("bad.json");
  std::ofstream(p) << "{ not json";
  EXPECT_EQ(call({"classify", "--config", p}).code, 2);
  EXPECT_EQ(call({"estimate", "--config", p}).code, 2);
}

TEST_F(CliFiles, EstimateGamblerRuin) {
  const auto cfg = write("gr.json", gr_config(20000));
  const auto out = path("gr.csv");
  const auto r = call({"estimate", "--config", cfg, "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("fingerprint ", 0), 0u);
  std::istringstream rows(slurp(out));
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  EXPECT_EQ(header, "estimator,params,point,stderr,ci_lo,ci_hi,replicas,censored,master_seed,fingerprint");
  // point is the first field after the quoted params.
  const auto q = row.find("}\",");
  ASSERT_NE(q, std::string::npos);
  const double point = std::stod(row.substr(q + 3));
  EXPECT_NEAR(point, 1.0 / 6, 0.01);
}

TEST_F(CliFiles, EstimateIsByteIdentical) {
  const auto cfg = write("gr.json", gr_config(3000));
  for (const std::string fmt : {"csv", "json"}) {
    const auto a = path("a." + fmt), b = path("b." + fmt);
    ASSERT_EQ(call({"estimate", "--config", cfg, "--out", a, "--format", fmt, "--threads", "1"}).code, 0);
    ASSERT_EQ(call({"estimate", "--config", cfg, "--out", b, "--format", fmt, "--threads", "3"}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_FALSE(slurp(a).empty());
  }
}

TEST_F(CliFiles, SeedOverrideChangesResult) {
  const auto cfg = write("gr.json", gr_config(3000));
  const auto a = call({"estimate", "--config", cfg});
  const auto b = call({"estimate", "--config", cfg, "--seed", "6"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_NE(a.out, b.out);
}

TEST_F(CliFiles, EstimateErrorsMapToExitCodes) {
  EXPECT_EQ(call({"estimate", "--config", write("zero.json", gr_config(0))}).code, 2);
  auto extra = gr_config(10);
  extra["colour"] = "red";
  EXPECT_EQ(call({"estimate", "--config", write("extra.json", extra)}).code, 2);
  const nlohmann::json censored = {
      {"schema", 1},
      {"profile", {{"family", "constant"}, {"params", {{"a", 2}}}}},
      {"estimator", {{"kind", "CollisionBeforeExit"}, {"N", 16}, {"d", 4}}},
      {"replicas", 10},
      {"horizon", 1}};
  EXPECT_EQ(call({"estimate", "--config", write("cens.json", censored)}).code, 3);
}

TEST_F(CliFiles, SweepRowsInGridOrder) {
  auto base = gr_config(500);
  const auto cfg = write("base.json", base);
  const auto grid = write("grid.json", nlohmann::json::array({{{"estimator", {{"v", 2}}}},
                                                              {{"estimator", {{"v", 0}}}},
                                                              {{"estimator", {{"v", 4}}}}}));
  const auto r = call({"sweep", "--config", cfg, "--grid", grid});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NE(rows[1].find("\"\"v\"\":2"), std::string::npos);
  EXPECT_FALSE(rows[2].substr(rows[2].rfind(',') + 1).empty());
  EXPECT_NE(rows[3].find("\"\"v\"\":4"), std::string::npos);
}

TEST(Cli, ExactQuantities) {
  auto r = call({"exact", "--quantity", "absorption", "--from", "1", "--b", "6", "--mode", "rational",
             "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("value").get<double>(), 1.0 / 6, 1e-15);
  EXPECT_EQ(j.at("mode"), "rational");
  r = call({"exact", "--quantity", "tooth-collisions", "--height", "1", "--v", "0", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("value").get<double>(), 1.125, 1e-12);
  r = call({"exact", "--quantity", "kernel-decay", "--beta", "3", "--n", "1"});
  EXPECT_EQ(r.code, 2);
  r = call({"exact", "--quantity", "absorption", "--from", "2", "--b", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("quantity,params,value,lower,upper,mode\n", 0), 0u);
}

TEST(Cli, SimulateCsv) {
  const auto r = call({"simulate", "--family", "constant", "--a", "2", "--start", "0,0", "--horizon", "5",
                       "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n,x,y", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
}

TEST(Cli, AcceptanceSingleCriterion) {
  const auto r = call({"acceptance", "fast", "--only", "4"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS criterion 4"), std::string::npos);
}
