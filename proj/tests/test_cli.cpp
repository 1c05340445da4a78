#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hbvm/cli.hpp"
#include "hbvm/tableau.hpp"

using namespace hbvm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hbvm_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("tableau json on stdout") {
  const auto r = run({"tableau", "--k", "3", "--s", "2", "--family", "rk", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  const auto tab = std::get<ButcherTableauRK>(import_tableau(r.out, TableauFormat::Json));
  const auto ref = build_rk(3, 2);
  CHECK(tab.A == ref.A);
  CHECK(tab.c == ref.c);
}

TEST_CASE("tableau families and csv export") {
  CHECK(run({"tableau", "--k", "3", "--s", "2", "--family", "rkn"}).out.find("A_bar") !=
        std::string::npos);
  CHECK(run({"tableau", "--k", "3", "--s", "2", "--family", "lowrank-symplectic"}).code == 0);
  CHECK(run({"tableau", "--k", "3", "--s", "2", "--family", "bogus"}).code == 1);

  const auto dir = scratch("csv");
  const auto r = run({"tableau", "--k", "4", "--s", "2", "--format", "csv", "--out", dir.string()});
  CHECK(r.code == 0);
  for (const char* name : {"meta.csv", "c.csv", "b.csv", "A.csv"}) CHECK(fs::exists(dir / name));
  CHECK(slurp(dir / "c.csv").rfind("i,value\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("k below s is rejected for every command") {
  const std::vector<std::vector<std::string>> commands{
      {"tableau"},
      {"integrate", "--problem", "harmonic", "--h", "0.1"},
      {"order-study", "--problem", "harmonic", "--h-list", "0.2,0.1,0.05,0.025"},
      {"drift-study", "--problem", "harmonic", "--h", "0.1"},
      {"rkn-equiv", "--problem", "harmonic", "--h", "0.1"}};
  for (auto args : commands) {
    CAPTURE(args[0]);
    args.insert(args.end(), {"--k", "1", "--s", "2"});
    const auto r = run(args);
    CHECK(r.code == 1);
    CHECK(r.err.find("k >= s required") != std::string::npos);
    CHECK(r.out.empty());
  }
}

TEST_CASE("rkn-equiv requires s >= 2") {
  const auto r = run({"rkn-equiv", "--problem", "kepler:0.3", "--k", "3", "--s", "1", "--h", "0.05"});
  CHECK(r.code == 1);
  CHECK(r.err.find("s >= 2") != std::string::npos);
  CHECK(run({"integrate", "--problem", "harmonic", "--k", "1", "--s", "1", "--h", "0.1",
             "--family", "rkn"})
            .code == 1);
}

TEST_CASE("usage errors name the offending flag") {
  auto r = run({"tableau", "--k", "2", "--s", "2", "--bogus", "3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);

  r = run({"integrate", "--problem", "harmonic", "--k", "2", "--s", "2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--h") != std::string::npos);

  r = run({"tableau", "--k", "two", "--s", "2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--k") != std::string::npos);

  r = run({"order-study", "--problem", "harmonic", "--k", "2", "--s", "2", "--h-list", "0.2,x"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--h-list") != std::string::npos);

  r = run({"drift-study", "--problem", "lorenz", "--k", "2", "--s", "2", "--h", "0.1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("lorenz") != std::string::npos);

  r = run({"tableau", "--k", "2", "--s", "2", "--format", "xml"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--format") != std::string::npos);

  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("numerical failures exit with status 2") {
  auto r = run({"order-study", "--problem", "polyosc:10", "--k", "2", "--s", "2", "--h-list",
                "4,2,1,0.5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("numerical failure") != std::string::npos);

  r = run({"integrate", "--problem", "polyosc:10", "--k", "2", "--s", "2", "--h", "4",
           "--steps", "3"});
  CHECK(r.code == 2);
  CHECK(r.out.rfind("step,time,q1,p1", 0) == 0);
}

TEST_CASE("drift-study writes its csv file") {
  const auto dir = scratch("drift");
  const auto file = dir / "drift.csv";
  const auto r = run({"drift-study", "--problem", "polyosc:4", "--k", "4", "--s", "2", "--h", "0.1",
                      "--steps", "1000", "--out", file.string()});
  CHECK(r.code == 0);
  REQUIRE(fs::exists(file));
  const std::string text = slurp(file);
  CHECK(text.rfind("step,time,H,drift\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1002);
  CHECK(r.out.rfind("max_abs_drift,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("identical flags give byte-identical output") {
  const std::vector<std::vector<std::string>> commands{
      {"tableau", "--k", "5", "--s", "3", "--family", "rkn"},
      {"integrate", "--problem", "henonheiles", "--k", "3", "--s", "2", "--h", "0.1", "--steps",
       "50"},
      {"order-study", "--problem", "pendulum", "--k", "2", "--s", "2", "--h-list",
       "0.2,0.1,0.05,0.025"},
      {"drift-study", "--problem", "kepler:0.5", "--k", "4", "--s", "2", "--h", "0.05"},
      {"rkn-equiv", "--problem", "kepler:0.3", "--k", "3", "--s", "2", "--h", "0.05"}};
  for (const auto& args : commands) {
    CAPTURE(args[0]);
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == 0);
    CHECK(!a.out.empty());
    CHECK(a.out == b.out);
  }
  const auto dir = scratch("det");
  for (const char* name : {"a.csv", "b.csv"})
    CHECK(run({"integrate", "--problem", "pendulum", "--k", "4", "--s", "3", "--h", "0.2", "--out",
               (dir / name).string()})
              .code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  fs::remove_all(dir);
}

TEST_CASE("order-study output formats") {
  const std::vector<std::string> base{"order-study", "--problem", "free",    "--k",
                                      "2",           "--s",       "2",       "--h-list",
                                      "0.2,0.1,0.05,0.025"};
  auto r = run(base);
  CHECK(r.code == 0);
  CHECK(r.out.find("0.2,10,0,NA") != std::string::npos);
  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json", "--t-end", "4"});
  r = run(json_args);
  CHECK(r.code == 0);
  CHECK(r.out.find("\"order\": \"NA\"") != std::string::npos);
  CHECK(r.out.find("\"t_end\": 4") != std::string::npos);
}
