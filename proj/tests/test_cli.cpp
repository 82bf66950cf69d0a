#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "souvlaki/graph_json.hpp"

using namespace souvlaki;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("souvlaki_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome run(const std::string& args, const std::string& env = "") const {
    std::string cmd = env + (env.empty() ? "" : " ") + SOUVLAKI_CLI_PATH + " " + args + " > " + path("stdout") +
                      " 2> " + path("stderr");
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(path("stdout")), slurp(path("stderr"))};
  }

  Json run_json(const std::string& args, const std::string& env = "") const {
    auto o = run(args, env);
    EXPECT_EQ(o.code, 0) << o.err;
    return Json::parse(o.out);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, BuildGadget) {
  auto o = run("build --graph gadget --n 2 --out " + path("d2.json"));
  ASSERT_EQ(o.code, 0) << o.err;
  auto g = read_graph(path("d2.json"));
  EXPECT_EQ(g.num_vertices(), 10u);
  EXPECT_EQ(Json::parse(o.out)["vertices"], 10);
}

TEST_F(Cli, GadgetResistance) {
  ASSERT_EQ(run("build --graph gadget --n 2 --out " + path("d2.json")).code, 0);
  auto j = run_json("analyze resistance --graph " + path("d2.json") + " --source pole+ --target pole-");
  EXPECT_NEAR(j["result"]["resistance"].get<double>(), 3.0, 1e-9);
  EXPECT_EQ(j["tool"], "souvlaki");
  EXPECT_EQ(j["command"][0], "analyze");
  EXPECT_FALSE(j.contains("wall_time"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("build --graph gadget --n 2 --out " + path("x.json") + " --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("build --graph nonsense --out " + path("x.json")).code, 2);
  EXPECT_EQ(run("build --graph gadget --n two --out " + path("x.json")).code, 2);
  EXPECT_EQ(run("report \"\"").code, 2);
  EXPECT_EQ(run("report").code, 2);
  EXPECT_EQ(run("report nonsense").code, 2);
  EXPECT_EQ(run("analyze minor --graph " + path("x.json")).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, DomainErrors) {
  auto o = run("analyze resistance --graph " + path("missing.json") + " --source a --target b");
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("missing.json"), std::string::npos);
  auto m = run("build --graph meatball --n 2 --bottom-len 5 --out " + path("m.json"));
  EXPECT_EQ(m.code, 1);
  EXPECT_FALSE(m.err.empty());
  ASSERT_EQ(run("build --graph gadget --n 1 --out " + path("d1.json")).code, 0);
  EXPECT_EQ(run("analyze walk --graph " + path("d1.json") + " --start pole+ --targets nowhere").code, 1);
  EXPECT_EQ(run("build --graph gadget --n 1 --out " + path("y.json"), "SOUVLAKI_WORKERS=zero").code, 1);
}

TEST_F(Cli, WalkIsSeededAndWorkerIndependent) {
  ASSERT_EQ(run("build --graph meatball --n 1 --out " + path("m1.json")).code, 0);
  std::string args = "analyze walk --graph " + path("m1.json") + " --start 'p1:0|1,2' --targets S --mc --trials 3000 --seed 5";
  auto one = run(args, "SOUVLAKI_WORKERS=1");
  auto three = run(args, "SOUVLAKI_WORKERS=3");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, three.out);
  auto mc = Json::parse(one.out)["result"];
  auto exact = run_json("analyze walk --graph " + path("m1.json") + " --start 'p1:0|1,2' --targets S --exact")["result"];
  ASSERT_EQ(mc["values"].size(), exact["values"].size());
  for (std::size_t i = 0; i < mc["values"].size(); ++i)
    EXPECT_NEAR(mc["values"][i].get<double>(), exact["values"][i].get<double>(),
                5 * mc["sigma"][i].get<double>() + 1e-12);
  EXPECT_EQ(run(args + " --exact").code, 2);
}

TEST_F(Cli, GeodesicsAndMinor) {
  ASSERT_EQ(run("build --graph h2 --n 2 --out " + path("h2.json")).code, 0);
  auto j = run_json("analyze geodesics --graph " + path("h2.json") + " --from t: --to t:22");
  EXPECT_EQ(j["result"]["length"], 2);
  EXPECT_EQ(j["result"]["count"], 1);
  EXPECT_EQ(j["result"]["verified"], true);
  ASSERT_EQ(run("build --graph gadget --n 3 --out " + path("d3.json")).code, 0);
  auto m = run_json("analyze minor --graph " + path("d3.json") + " --r 4 --budget 100000");
  EXPECT_EQ(m["result"]["verdict"], "found");
  EXPECT_EQ(m["result"]["verified"], true);
  auto h = run_json("analyze hyperbolicity --graph " + path("h2.json"));
  EXPECT_EQ(h["result"]["exhaustive"], true);
  EXPECT_EQ(h["result"]["delta"], 1.0);
}

TEST_F(Cli, FlowReport) {
  auto j = run_json("analyze flow --souvlaki-n 3 --per-j --csv " + path("flow.csv"));
  EXPECT_NEAR(j["result"]["energy"].get<double>(), 6.923611111111111, 1e-9);
  EXPECT_LT(j["result"]["max_interior_divergence"].get<double>(), 1e-12);
  EXPECT_EQ(j["result"]["per_j"].size(), 2u + 4u + 8u);
  auto csv = slurp(path("flow.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST_F(Cli, QuotientOfSkewerTree) {
  ASSERT_EQ(run("build --graph stretched --n 1 --out " + path("st.json")).code, 0);
  ASSERT_EQ(run("build --graph spanning-tree --host " + path("st.json") + " --out " + path("t.json")).code, 0);
  auto j = run_json("analyze quotient --graph " + path("st.json") + " --tree " + path("t.json") + " --R 4");
  const auto& b = j["result"]["blocks"];
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0]["vertices"], 66);
  EXPECT_NEAR(b[0]["R_eff"].get<double>(), 65.0, 1e-8);
  EXPECT_GE(b[0]["floor"].get<double>(), 1.0);
}

TEST_F(Cli, ReportsAreByteIdentical) {
  for (const char* suite : {"flows", "resistance"}) {
    std::string args = std::string("report ") + suite + " --dir " + path("rep");
    ASSERT_EQ(run(args).code, 0);
    std::map<std::string, std::string> first;
    for (const auto& e : fs::directory_iterator(dir_ / "rep")) first[e.path().filename()] = slurp(e.path());
    ASSERT_EQ(run(args, "SOUVLAKI_WORKERS=2").code, 0);
    for (const auto& [name, text] : first) EXPECT_EQ(slurp(dir_ / "rep" / name), text) << name;
    EXPECT_TRUE(first.count(std::string(suite) + ".json"));
  }
  auto csv = slurp(dir_ / "rep" / "resistance.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}
