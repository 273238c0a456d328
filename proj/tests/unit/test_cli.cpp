#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fdss/cli.hpp"

using namespace fdss;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "fdss-cli-test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"test", "--data", "x.csv"}).code == kExitUsage);  // --seed missing
  const Run r = run({"test", "--data", "x.csv", "--seed", "1", "--tests", "ss-nope"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("ss-asym") != std::string::npos);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("simulate then test") {
  const auto data = scratch("sim.csv");
  REQUIRE(run({"simulate", "--seed", "3", "--sizes", "6,6,6", "--points", "10", "--c2", "4",
               "--out", data.string()})
              .code == kExitOk);
  const Run json = run({"test", "--data", data.string(), "--a", "0.25", "--b", "0.75", "--tests",
                        "ss-asym,ss-perm,zc", "--seed", "5", "--perms", "100", "--draws", "200"});
  REQUIRE(json.code == kExitOk);
  const auto doc = nlohmann::json::parse(json.out);
  CHECK(doc["reports"].size() == 3);
  CHECK(doc["reports"][1]["test"] == "ss-perm");
  CHECK(doc["manifest"]["seed"] == 5);
  CHECK(doc["manifest"]["config"]["calibration"]["perms"] == 100);
  const Run again = run({"test", "--data", data.string(), "--a", "0.25", "--b", "0.75", "--tests",
                         "ss-asym,ss-perm,zc", "--seed", "5", "--perms", "100", "--draws", "200",
                         "--threads", "1"});
  CHECK(again.out == json.out);
  const Run csv = run({"test", "--data", data.string(), "--seed", "5", "--format", "csv"});
  CHECK(csv.out.rfind("test,statistic,p_value,method,replicates\nss-asym,", 0) == 0);
}

TEST_CASE("simulate writes a domain sidecar that test picks up") {
  const auto data = scratch("sidecar.csv");
  REQUIRE(run({"simulate", "--seed", "3", "--sizes", "4,4,4", "--points", "6", "--a", "2", "--b",
               "5", "--out", data.string()})
              .code == kExitOk);
  const auto sidecar = nlohmann::json::parse(slurp(data.string() + ".domain.json"));
  CHECK(sidecar["a"] == 2.0);
  CHECK(sidecar["b"] == 5.0);
  const Run r = run({"test", "--data", data.string(), "--seed", "1", "--tests", "zc"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["manifest"]["config"]["domain"]["a"] == 2.0);
  CHECK(doc["manifest"]["config"]["domain"]["b"] == 5.0);
  const Run flags = run({"test", "--data", data.string(), "--seed", "1", "--tests", "zc", "--b",
                         "9"});
  CHECK(nlohmann::json::parse(flags.out)["manifest"]["config"]["domain"]["b"] == 9.0);
  std::ofstream(data.string() + ".domain.json") << "{\"a\": 1}";
  CHECK(run({"test", "--data", data.string(), "--seed", "1"}).code == kExitData);
  std::filesystem::remove(data.string() + ".domain.json");
}

TEST_CASE("data errors exit with 2 and name the location") {
  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "g,t1,t2\nA,1,2\nB,1,oops\n";
  const Run r = run({"test", "--data", bad.string(), "--seed", "1"});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("row 3, column 3") != std::string::npos);
  CHECK(run({"test", "--data", scratch("missing.csv").string(), "--seed", "1"}).code == kExitData);
}

TEST_CASE("size and power runs write tables and manifests") {
  const auto cfg = scratch("exp.toml");
  std::ofstream(cfg) << "[experiment]\nsizes = [5, 5, 5]\ntests = [\"zc\", \"ss-perm\"]\n"
                        "replications = 10\n[domain]\npoints = 10\n[shift]\nc2 = [0, 30]\n"
                        "[calibration]\nperms = 40\n";
  const auto out = scratch("power.csv");
  const auto manifest = scratch("power.json");
  REQUIRE(run({"power", "--config", cfg.string(), "--seed", "2", "--out", out.string(),
               "--manifest", manifest.string()})
              .code == kExitOk);
  const std::string table = slurp(out);
  CHECK(table.rfind("test,c1,c2,rate,standard_error,rejections,valid,errors\nzc,0,0,", 0) == 0);
  const auto m = nlohmann::json::parse(slurp(manifest));
  CHECK(m["command"] == "power");
  CHECK(m["seed"] == 2);
  CHECK(m["config"]["replications"] == 10);
  CHECK(m.contains("wall_seconds"));
  const auto plain = scratch("power-default.csv");
  std::filesystem::remove(plain.string() + ".manifest.json");
  REQUIRE(run({"power", "--config", cfg.string(), "--seed", "7", "--out", plain.string()}).code ==
          kExitOk);
  CHECK(nlohmann::json::parse(slurp(plain.string() + ".manifest.json"))["seed"] == 7);
  const Run piped = run({"power", "--config", cfg.string(), "--seed", "7"});
  REQUIRE(piped.code == kExitOk);
  CHECK(piped.out == slurp(plain));
  CHECK(nlohmann::json::parse(piped.err)["command"] == "power");
  const Run size = run({"size", "--config", cfg.string(), "--seed", "2", "--replications", "4"});
  CHECK(size.code == kExitOk);
  CHECK(size.out.find(",4,0\n") != std::string::npos);
  const auto broken = scratch("broken.toml");
  std::ofstream(broken) << "[experiment]\nreplications = \n";
  const Run r = run({"size", "--config", broken.string(), "--seed", "2"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("broken.toml:2:") != std::string::npos);
}

TEST_CASE("subsample lists omitted groups") {
  const auto data = scratch("sub.csv");
  std::ofstream f(data);
  f << "group,t1,t2,t3\n";
  for (int i = 0; i < 12; ++i) f << "big," << i << ',' << (i * 7) % 5 << ',' << (i * 3) % 4 << '\n';
  for (int i = 0; i < 4; ++i) f << "small," << i << ",1," << i * 2 << '\n';
  for (int i = 0; i < 9; ++i) f << "mid," << (i * 5) % 7 << ',' << i << ",2\n";
  f.close();
  const Run r = run({"subsample", "--data", data.string(), "--seed", "1", "--subgroup-size", "3",
                     "--replications", "5", "--perms", "30"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["omitted_groups"] == nlohmann::json::array({"small"}));
  CHECK(doc["included_groups"] == nlohmann::json::array({"big", "mid"}));
  CHECK(r.err.find("small") != std::string::npos);
}

TEST_CASE("asym-power prints one row per test and c2") {
  const Run r = run({"asym-power", "--seed", "1", "--tests", "ss,hr", "--c2", "0,50",
                     "--derivative-pairs", "500", "--outer", "100", "--inner", "20",
                     "--covariance-paths", "300", "--gaussian-draws", "1000"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 5);
  CHECK(run({"asym-power", "--seed", "1", "--tests", "ss,fmax"}).code == kExitUsage);
}
