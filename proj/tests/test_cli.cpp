#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("rbody_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(RBODY_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir) {
  fs::path c = dir / "gaussian.json";
  std::ofstream(c) << R"({"beta": 2, "N": 20, "segments": [[-3, 3]],
    "potential": {"type": "polynomial_sum", "terms": [{"arity": 1, "coeff": -1, "factors": [[0, 0, 1]]}]}})";
  return c;
}

}  // namespace

TEST_CASE("missing configuration is a configuration error") {
  auto d = scratch("missing");
  CHECK(run("eqsolve --config " + (d / "nope.json").string() + " --out " + d.string(), d / "log") == 2);
}

TEST_CASE("stages need their inputs") {
  auto d = scratch("dep");
  auto c = write_config(d);
  CHECK(run("expand --config " + c.string() + " --out " + (d / "out").string(), d / "log") == 2);
}

TEST_CASE("equilibrium stage, manifest and plot data") {
  auto d = scratch("eq");
  auto c = write_config(d);
  auto out = d / "out";
  REQUIRE(run("eqsolve --config " + c.string() + " --out " + out.string(), d / "log") == 0);
  auto j = nlohmann::json::parse(slurp(out / "equilibrium.json"));
  auto cut = j["cuts"][0];
  CHECK(cut["a"].get<double>() == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-8));
  CHECK(cut["b"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  const std::string m1 = slurp(out / "manifest.json");
  REQUIRE(run("eqsolve --config " + c.string() + " --out " + out.string(), d / "log") == 0);
  CHECK(slurp(out / "manifest.json") == m1);

  REQUIRE(run("plot --out " + out.string() + " --kind density", d / "plot") == 0);
  std::istringstream csv(slurp(out / "density.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    CHECK(std::count(line.begin(), line.end(), ',') == 1);
    ++rows;
  }
  CHECK(rows > 10);

  CHECK(run("plot --out " + out.string() + " --kind nonsense", d / "bad") == 2);
  const std::string msg = slurp(d / "bad");
  CHECK(msg.find("density") != std::string::npos);
  CHECK(msg.find("charfn") != std::string::npos);
}
