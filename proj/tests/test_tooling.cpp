#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <spectools/csv.hpp>
#include <spectools/runner.hpp>
#include <spectools/svg.hpp>
#include <sstream>
#include <string>
#include <vector>

using namespace speclab::tools;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("speclab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_occurrences(const std::string& hay, const std::string& pin) {
  std::size_t count = 0;
  for (std::size_t pos = hay.find(pin); pos != std::string::npos;
       pos = hay.find(pin, pos + pin.size()))
    ++count;
  return count;
}

RunConfig parse(std::vector<std::string> args) {
  std::vector<const char*> argv = {"speclab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.5, -3.14159, 1e-300, 123456.789, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(format_double(v) == s);
  }
}

TEST_CASE("csv writer enforces the column count") {
  const fs::path dir = temp_dir("csv");
  const fs::path file = dir / "t.csv";
  {
    CsvWriter csv(file.string(), {"a", "b"});
    csv.row({"1", "2"});
    CHECK_THROWS_AS(csv.row({"only-one"}), std::invalid_argument);
  }
  CHECK(slurp(file) == "a,b\n1,2\n");
}

TEST_CASE("svg writers emit well-formed documents") {
  const fs::path dir = temp_dir("svg");
  const fs::path ev = dir / "vals.svg";
  write_eigenvalue_svg(ev.string(), {0.0, 0.5, 1.0, 1.5}, 0.8, "test vals");
  const std::string doc = slurp(ev);
  CHECK(doc.rfind("<?xml", 0) == 0);
  CHECK(doc.find("<svg") != std::string::npos);
  CHECK(doc.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  CHECK(doc.find("</svg>") != std::string::npos);
  // Exactly one dashed marker line.
  CHECK(count_occurrences(doc, "stroke-dasharray") == 1);

  const fs::path evec = dir / "vecs.svg";
  std::vector<double> xs = {1.0, 1.2, 1.4, 1.9};
  speclab::Matrix vecs(4, 2);
  vecs << 0.1, -0.1, 0.2, -0.2, 0.3, -0.3, 0.4, -0.4;
  write_eigenvector_svg(evec.string(), xs, vecs, "test vecs");
  const std::string vdoc = slurp(evec);
  CHECK(vdoc.find("<polyline") != std::string::npos);
  CHECK(vdoc.find("</svg>") != std::string::npos);
}

TEST_CASE("parse_config accepts a full converge invocation") {
  const RunConfig cfg =
      parse({"converge", "--density", "twobump", "--kernel", "product",
             "--nlist", "100,200,400,800", "--seed", "7"});
  CHECK(cfg.command == "converge");
  CHECK(cfg.density == "twobump");
  CHECK(cfg.kernel == "product");
  CHECK(cfg.n_list == std::vector<std::size_t>{100, 200, 400, 800});
  CHECK(cfg.seed == 7);
  CHECK(cfg.grid_nodes == 4000);
  CHECK(cfg.margin == 0.05);
  CHECK(cfg.reps == 20);
  CHECK(cfg.laplacian == "sym");
  CHECK(cfg.workers >= 1);
}

TEST_CASE("parse_config surfaces precondition violations as usage errors") {
  CHECK_THROWS_AS(parse({"converge", "--nlist", "100"}), UsageError);
  CHECK_THROWS_AS(parse({"converge", "--nlist", "400,200,100,50"}),
                  UsageError);
  CHECK_THROWS_AS(parse({"cluster", "--n", "1"}), UsageError);
  CHECK_THROWS_AS(parse({"cluster", "--s", "3.5"}), UsageError);
  CHECK_THROWS_AS(parse({"cluster", "--density", "nope"}), UsageError);
  CHECK_THROWS_AS(parse({"cluster", "--unknown-flag"}), UsageError);
  CHECK_THROWS_AS(parse({}), UsageError);
}

TEST_CASE("config file values yield to explicit flags") {
  const fs::path dir = temp_dir("cfg");
  const fs::path file = dir / "config.json";
  std::ofstream(file) << R"({"n": 200, "sigma": 2.5})";
  const RunConfig cfg =
      parse({"cluster", "--config", file.string(), "--n", "400"});
  CHECK(cfg.n == 400);      // flag wins
  CHECK(cfg.sigma == 2.5);  // file fills the gap

  std::ofstream(file) << R"({"granularity": 12})";
  CHECK_THROWS_AS(parse({"cluster", "--config", file.string()}), UsageError);

  std::ofstream(file) << R"({"command": "figures"})";
  CHECK_THROWS_AS(parse({"cluster", "--config", file.string()}), UsageError);
}

TEST_CASE("dispatch writes the documented artifacts for cluster") {
  const fs::path dir = temp_dir("cluster");
  RunConfig cfg = parse({"cluster", "--density", "mixture", "--kernel",
                         "gaussian", "--sigma", "1", "--n", "60", "--seed",
                         "3", "--out", dir.string()});
  CHECK(dispatch(cfg) == kExitOk);
  CHECK(fs::exists(dir / "eigenvalues.csv"));
  CHECK(fs::exists(dir / "eigenvectors.csv"));
  CHECK(fs::exists(dir / "labels.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "eigenvalues.svg"));

  const std::string vals = slurp(dir / "eigenvalues.csv");
  CHECK(vals.rfind("index,eigenvalue,status,ipr\n", 0) == 0);
  const std::string vecs = slurp(dir / "eigenvectors.csv");
  CHECK(vecs.rfind("point,x,v1,v2,v3,v4,v5\n", 0) == 0);
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"seed\": 3") != std::string::npos);
}

TEST_CASE("dispatch maps scenario violations to exit code 3") {
  const fs::path dir = temp_dir("exit3");
  RunConfig cfg = parse({"cluster", "--density", "mixture", "--kernel",
                         "product", "--out", dir.string()});
  CHECK(dispatch(cfg) == kExitScenario);
}

TEST_CASE("run_cli maps bad usage to exit code 2") {
  const char* argv[] = {"speclab", "converge", "--nlist", "100"};
  CHECK(run_cli(4, argv) == kExitUsage);
  const char* none[] = {"speclab"};
  CHECK(run_cli(1, none) == kExitUsage);
}

TEST_CASE("converge artifacts carry the documented headers") {
  const fs::path dir = temp_dir("converge");
  RunConfig cfg =
      parse({"converge", "--density", "mixture", "--kernel", "gaussian",
             "--sigma", "1", "--nlist", "50,100,150,200", "--reps", "2",
             "--gridN", "500", "--seed", "5", "--no-svg", "--out",
             dir.string()});
  CHECK(dispatch(cfg) == kExitOk);
  const std::string conv = slurp(dir / "convergence.csv");
  CHECK(conv.rfind(
            "n,rep,lambda2_sample,lambda2_limit,vec_sup_err,sign\n", 0) == 0);
  const std::string rate = slurp(dir / "rate.csv");
  CHECK(rate.rfind("slope,intercept,r2\n", 0) == 0);
}
