#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ordinal/cli.hpp"
#include "ordinal/data.hpp"

using namespace ordinal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ordinal_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("list-methods prints one line per method") {
  const auto r = cli({"list-methods"});
  CHECK(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::vector<std::string> all;
  for (std::string line; std::getline(lines, line);) all.push_back(line);
  REQUIRE(all.size() == 10);
  CHECK(all[0].rfind("ce_baseline learning_rate={0.0001,0.001,0.01} configs=3", 0) == 0);
  CHECK(all[9].rfind("triangular learning_rate={0.0001,0.001,0.01} adjacent_probability={0.01,0.05,0.1} "
                     "eta={0.8,1} configs=18",
                     0) == 0);
}

TEST_CASE("generate-data writes a readable CSV") {
  const auto dir = scratch("gen");
  const auto path = (dir / "d.csv").string();
  const auto r = cli({"generate-data", "--out", path, "--n", "150", "--features", "3", "--classes", "3", "--noise",
                      "0.2", "--proportions", "0.5,0.3,0.2", "--seed", "4"});
  CHECK(r.code == kExitOk);
  const auto d = load_csv(path);
  CHECK(d.size() == 150);
  CHECK(d.num_features() == 3);
  const auto counts = d.class_counts();
  CHECK(counts[0] == 75);
  CHECK(counts[1] == 45);
  CHECK(counts[2] == 30);
  CHECK(cli({"generate-data", "--out", path, "--n", "2", "--features", "3", "--classes", "3", "--noise", "0.2",
             "--seed", "4"})
            .code == kExitConfig);
}

TEST_CASE("evaluate prints the metric report") {
  const auto dir = scratch("eval");
  std::ofstream(dir / "y.csv") << "label\n0\n1\n2\n2\n";
  std::ofstream(dir / "p.csv") << "p0,p1,p2\n1,0,0\n0,1,0\n0,0,1\n0,0,1\n";
  const auto r = cli({"evaluate", "--true", (dir / "y.csv").string(), "--proba", (dir / "p.csv").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("qwk=1") != std::string::npos);
  CHECK(r.out.find("mae=0") != std::string::npos);
  CHECK(r.out.find("ccr=1") != std::string::npos);
  CHECK(r.out.find("rps=0") != std::string::npos);

  std::ofstream(dir / "bad.csv") << "p0,p1,p2\n0.5,0.2,0\n0,1,0\n0,0,1\n0,0,1\n";
  const auto bad = cli({"evaluate", "--true", (dir / "y.csv").string(), "--proba", (dir / "bad.csv").string()});
  CHECK(bad.code == kExitData);
  CHECK(bad.err.find("error:") != std::string::npos);
  CHECK(cli({"evaluate", "--true", (dir / "missing.csv").string(), "--proba", (dir / "p.csv").string()}).code ==
        kExitData);
}

TEST_CASE("argument and config errors") {
  CHECK(cli({}).code == kExitConfig);
  CHECK(cli({"frobnicate"}).code == kExitConfig);
  CHECK(cli({"run", "--out", "x"}).code == kExitConfig);

  const auto dir = scratch("cfg");
  std::ofstream(dir / "bad.json") << R"({"datasets": [{"name": "s", "synthetic": {}}], "estimators": ["svm"]})";
  const auto r = cli({"run", "--config", (dir / "bad.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("unknown method") != std::string::npos);
  CHECK(cli({"run", "--config", (dir / "none.json").string(), "--out", (dir / "o").string()}).code != kExitOk);
  std::ofstream(dir / "data.json") << R"({"datasets": [{"name": "f", "csv": "nope.csv"}], "estimators": ["sb"]})";
  CHECK(cli({"run", "--config", (dir / "data.json").string(), "--out", (dir / "o").string()}).code == kExitData);
}

TEST_CASE("run writes outputs deterministically") {
  const auto dir = scratch("run");
  std::ofstream(dir / "c.json") << R"({
    "datasets": [{"name": "s", "synthetic": {"n_samples": 200, "n_features": 3, "num_classes": 3, "seed": 1}}],
    "estimators": ["clm", "obdecoc"],
    "protocol": {"seeds": [0, 1], "budget": 2, "max_epochs": 4, "patience": 4, "hidden_dims": [6]}
  })";
  const auto a = cli({"run", "--config", (dir / "c.json").string(), "--out", (dir / "a").string()});
  const auto b = cli({"run", "--config", (dir / "c.json").string(), "--out", (dir / "b").string(), "--jobs", "2"});
  CHECK(a.code == kExitOk);
  CHECK(b.code == kExitOk);
  for (auto f : {"runs.csv", "summary.csv", "summary.md", "metadata.json"}) CHECK(fs::exists(dir / "a" / f));

  // drop the time column before comparing
  auto strip_time = [](const std::string& text) {
    std::istringstream in(text);
    std::string out;
    for (std::string line; std::getline(in, line);) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
      cells.erase(cells.begin() + 13);
      for (const auto& c : cells) out += c + ",";
      out += "\n";
    }
    return out;
  };
  const auto ra = slurp(dir / "a" / "runs.csv");
  CHECK(std::count(ra.begin(), ra.end(), '\n') == 5);
  CHECK(strip_time(ra) == strip_time(slurp(dir / "b" / "runs.csv")));
  CHECK(slurp(dir / "a" / "metadata.json").find("validation") != std::string::npos);
}

TEST_CASE("installed binary reports exit codes") {
  const char* exe = std::getenv("ORDINAL_CLI");
  if (!exe) return;
  const std::string quiet = " > /dev/null 2>&1";
  CHECK(std::system((std::string(exe) + " list-methods" + quiet).c_str()) == 0);
  const int code = std::system((std::string(exe) + " evaluate --true /nonexistent --proba /nonexistent" + quiet).c_str());
  CHECK(WEXITSTATUS(code) == kExitData);
}
