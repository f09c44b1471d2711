#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tselliptic/cli.hpp"
#include "tselliptic/config.hpp"

using namespace tselliptic;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tselliptic-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string config_path(const std::string& name) { return std::string(TSELLIPTIC_SOURCE_DIR) + "/configs/" + name; }

fs::path write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST(ConfigParse, FullSchema) {
  const auto c = parse_config(json::parse(R"({
    "axes": ["[0,1],2,3", "0,1,2"],
    "mesh": [{"h": 0.1, "junction_weights": false}, {"default_subintervals": 4}],
    "f": "C*u",
    "params": {"C": -0.5},
    "hypotheses": {"L": 0.5, "alpha": "C", "C": 1},
    "solver": {"method": "homotopy", "homotopy_steps": 5, "max_iter": 100},
    "output": {"dir": "x", "formats": ["json"]}
  })"));
  ASSERT_EQ(c.axes.size(), 2u);
  ASSERT_EQ(c.mesh.size(), 2u);
  EXPECT_EQ(c.mesh[0].h, 0.1);
  EXPECT_FALSE(c.mesh[0].junction_weights);
  EXPECT_EQ(c.mesh[1].default_subintervals, 4);
  EXPECT_EQ(c.params.at("C"), -0.5);
  EXPECT_EQ(std::get<std::string>(*c.alpha), "C");
  EXPECT_EQ(c.solver.method, "homotopy");
  EXPECT_EQ(c.solver.settings.homotopy_steps, 5u);
  EXPECT_EQ(c.output.formats, std::vector<std::string>{"json"});

  const auto prepared = prepare(c);
  EXPECT_EQ(*prepared.problem.hypotheses.alpha, -0.5);
  EXPECT_EQ(prepared.problem.f.eval(std::vector<double>{0.0, 0.0}, 2.0), -1.0);
}

TEST(ConfigParse, Rejections) {
  const char* bad[] = {
      R"({"axes": ["0,1,2,3"], "colour": 1})",
      R"({"axes": []})",
      R"({"f": "u"})",
      R"({"axes": ["0,1,2,3"], "mesh": {"h": -1}})",
      R"({"axes": ["0,1,2,3"], "mesh": [{"h": 1}, {"h": 1}]})",
      R"({"axes": ["0,1,2,3"], "solver": {"method": "newton"}})",
      R"({"axes": ["0,1,2,3"], "hypotheses": {"L": true}})",
      R"({"axes": ["0,1","0,1","0,1","0,1","0,1"]})",
  };
  for (const char* s : bad) EXPECT_THROW(parse_config(json::parse(s)), ConfigError) << s;
}

TEST(ConfigPrepare, Rejections) {
  const auto prep = [](const char* s) { return prepare(parse_config(json::parse(s))); };
  EXPECT_THROW(prep(R"({"axes": ["0,1"]})"), ConfigError);
  EXPECT_THROW(prep(R"({"axes": ["0,1,2,3"], "f": "x2 + u"})"), ConfigError);
  EXPECT_THROW(prep(R"({"axes": ["0,1,2,3"], "f": "u +"})"), ConfigError);
  EXPECT_THROW(prep(R"({"axes": ["0,1,2,3"], "hypotheses": {"L": -1}})"), ConfigError);
  EXPECT_THROW(prep(R"({"axes": ["0,1,2,3"], "hypotheses": {"L": "u"}})"), ConfigError);
  try {
    prep(R"({"axes": ["0,1,2,3", "[0,1"]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("axes[1]"), std::string::npos) << e.what();
  }
}

TEST(ConfigPrepare, Lambda1IsBound) {
  const auto p = prepare(parse_config(json::parse(R"({"axes": ["0,1,2,3"], "f": "-lambda1*u",
      "hypotheses": {"L": "lambda1"}})")));
  EXPECT_NEAR(*p.problem.hypotheses.L, 1.0, 1e-12);
  EXPECT_NEAR(p.problem.f.eval(std::vector<double>{1.0}, 1.0), -1.0, 1e-12);
}

TEST(ConfigLoad, MalformedFile) {
  const auto dir = scratch("load");
  EXPECT_THROW(load_config(write_file(dir / "bad.json", "{ not json").string()), ConfigError);
  EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
}

TEST(CliSpectrum, DiscreteScale) {
  const auto dir = scratch("spectrum");
  const auto r = run({"spectrum", "--domain", "0,1,2,3", "--k", "5", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("eigenvalues: 1,3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("shooting: 1,3"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "eigenvalues.csv"));
  const auto j = read_json(dir / "spectrum.json");
  ASSERT_EQ(j["eigenvalues"].size(), 2u);
  EXPECT_NEAR(j["eigenvalues"][1]["eigenvalue"].get<double>(), 3.0, 1e-12);
  EXPECT_TRUE(j["short_of_request"].get<bool>());
}

TEST(CliSpectrum, HybridAndPlane) {
  const auto dir = scratch("spectrum2");
  auto r = run({"spectrum", "--domain", "[0,1],2,3", "--h", "0.001", "--k", "3", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("lambda1: 0.8404"), std::string::npos) << r.out;
  r = run({"spectrum", "--domain", "0,1,2,3", "--domain", "0,1,2,3", "--k", "4", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("eigenvalues: 2,4,4,6"), std::string::npos) << r.out;
  std::ifstream csv(dir / "eigenvalues.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "i1,i2,eigenvalue");
}

TEST(CliSolve, ConfigsAndExitCodes) {
  const auto dir = scratch("solve");
  auto r = run({"solve", "--config", config_path("discrete_constant.json"), "--out", (dir / "a").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  auto j = read_json(dir / "a" / "solution.json");
  EXPECT_EQ(j["status"], "converged");
  EXPECT_TRUE(fs::exists(dir / "a" / "solution.csv"));

  r = run({"solve", "--config", config_path("resonance.json"), "--out", (dir / "b").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(read_json(dir / "b" / "solution.json")["status"], "non_contraction");

  r = run({"solve", "--config", config_path("resonance.json"), "--method", "homotopy", "--out", (dir / "c").string()});
  EXPECT_EQ(r.code, 0) << r.err;

  r = run({"solve", "--config", config_path("no_solution.json"), "--out", (dir / "d").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(fs::exists(dir / "d" / "roots.csv"));
  EXPECT_EQ(read_json(dir / "d" / "solution.json")["status"], "no_real_solution_suspected");
}

TEST(CliSolve, FlagsWithoutConfig) {
  const auto dir = scratch("solve-flags");
  const auto r = run({"solve", "--domain", "0,1,2,3", "--f", "1 + x^2", "--L", "0", "--out", dir.string(), "--format",
                      "json"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = read_json(dir / "solution.json");
  EXPECT_FALSE(fs::exists(dir / "solution.csv"));
  EXPECT_EQ(j["status"], "converged");
}

TEST(CliSolve, ErrorsMapToExitCodes) {
  const auto dir = scratch("solve-errors");
  EXPECT_EQ(run({"solve", "--domain", "0,1,2,3", "--f", "u", "--out", dir.string()}).code, 3);  // L missing
  EXPECT_EQ(run({"solve", "--domain", "0,1,2,3", "--f", "x2", "--L", "0", "--out", dir.string()}).code, 3);
  EXPECT_EQ(run({"solve", "--domain", "[0,1", "--f", "0", "--L", "0", "--out", dir.string()}).code, 3);
  EXPECT_EQ(run({"solve", "--config", (dir / "nope.json").string()}).code, 3);
  EXPECT_EQ(run({"solve", "--domain", "0,1,2,3", "--method", "newton", "--out", dir.string()}).code, 3);
  const auto r = run({"solve", "--domain", "0,1,2,3", "--f", "1/u", "--L", "0", "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(read_json(dir / "solution.json")["status"], "evaluation_error");
  EXPECT_EQ(run({"frobnicate"}).code, 3);
  EXPECT_EQ(run({}).code, 3);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliGreens, ValuesAndInverse) {
  const auto dir = scratch("greens");
  auto r = run({"greens", "--domain", "0,1,2,3", "--t", "1", "--s", "2", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("G(1,2) = 0.333333333333"), std::string::npos) << r.out;
  r = run({"greens", "--domain", "[0,3]", "--t", "1.5", "--s", "1.5", "--out", dir.string()});
  EXPECT_NE(r.out.find("G(1.5,1.5) = 0.75"), std::string::npos) << r.out;
  r = run({"greens", "--domain", "[0,1],2,3", "--h", "0.05", "--function", "cos(t) + 1", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("max |A y - f|"), std::string::npos);
  const auto file = write_file(dir / "f.txt", "t^2\n");
  r = run({"greens", "--domain", "0,1,2,3", "--function-file", file.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"greens", "--domain", "0,1,2,3", "--t", "5", "--s", "1", "--out", dir.string()}).code, 3);
  EXPECT_EQ(run({"greens", "--domain", "0,1,2,3", "--domain", "0,1,2,3", "--t", "1", "--s", "1"}).code, 3);
}

TEST(CliReproduce, SingleScenarioAndUnknownId) {
  const auto dir = scratch("reproduce");
  const auto r = run({"reproduce", "ex-7.3", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ALL PASS"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "reproduce.json"));
  EXPECT_EQ(run({"reproduce", "ex-9.9", "--out", dir.string()}).code, 3);
}
