#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string command = std::string(CIMETER_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) r.out.append(buffer.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cimeter_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path generated(const std::string& name, const std::string& args) {
  const fs::path path = scratch(name);
  const Run r = cli("generate " + args + " --out " + path.string());
  REQUIRE(r.code == 0);
  return path;
}

json strip_runtime(json doc) {
  doc.erase("runtime_ms");
  return doc;
}

}  // namespace

TEST_CASE("generate then compute every measure") {
  const fs::path data = generated("ci.csv", "--model gaussian_ci --n 60 --seed 3");
  for (const char* m : {"dcov_v", "hsic_v", "gcdcov_at", "hscic_at", "avg_hscic", "gcdcov_avg", "hscic_vstat",
                        "hscic_trace"}) {
    CAPTURE(m);
    const Run r = cli("compute --input " + data.string() + " --measure " + m);
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["schema"] == "cimeter/1");
    CHECK(doc["measure"] == m);
    CHECK(doc["n"] == 60);
    CHECK(doc["value"].get<double>() >= 0.0);
    CHECK(doc.contains("params"));
    CHECK(doc.contains("config"));
    CHECK(doc.contains("runtime_ms"));
  }
}

TEST_CASE("generate writes to stdout by default") {
  const Run r = cli("generate --model discrete_z_mixture --n 12 --seed 1");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("#roles:", 0) == 0);
}

TEST_CASE("input errors exit with code 2") {
  const fs::path data = generated("roles.csv", "--n 20");
  CHECK(cli("compute --input " + data.string() + " --measure avg_hscic --roles \"x=nope;y=y0;z=z0\"").code == 2);
  CHECK(cli("compute --input " + data.string() + " --measure pearson").code == 2);
  CHECK(cli("compute --input " + data.string() + " --measure avg_hscic --format xml").code == 2);
  CHECK(cli("compute --input " + scratch("missing.csv").string() + " --measure avg_hscic").code == 2);
  CHECK(cli("compute --input " + data.string() + " --measure hscic_at --at-row 99").code == 2);
  CHECK(cli("compute --measure avg_hscic").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("test --input " + data.string() + " --B 5").code == 2);
  CHECK(cli("generate --model nonsense").code == 2);

  const fs::path bad = scratch("bad.csv");
  std::ofstream(bad) << "#roles: x=a;y=b;z=c\na,b,c\n1,2,3\n4,oops,6\n";
  CHECK(cli("compute --input " + bad.string() + " --measure avg_hscic").code == 2);
}

TEST_CASE("a singular ridge system exits with code 3") {
  const fs::path data = generated("singular.csv", "--n 30 --seed 2");
  CHECK(cli("compute --input " + data.string() + " --measure hscic_trace --lambda 1e-300").code == 3);
}

TEST_CASE("outputs are deterministic apart from timing") {
  const fs::path data = generated("det.csv", "--model gaussian_dep --coupling 0.5 --n 50 --seed 4");
  const std::string args = "test --input " + data.string() + " --B 30 --seed 9";
  const Run a = cli(args);
  const Run b = cli(args);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(strip_runtime(json::parse(a.out)) == strip_runtime(json::parse(b.out)));
  CHECK(cli("generate --n 25 --seed 8").out == cli("generate --n 25 --seed 8").out);
}

TEST_CASE("verify exit codes") {
  const Run plain = cli("verify");
  CHECK(plain.code == 0);
  const json doc = json::parse(plain.out);
  CHECK(doc["passed"] == true);
  CHECK(doc["checks"].size() >= 10);
  CHECK(cli("verify --seed 17").code == 0);
  CHECK(cli("verify --inject-fault").code == 1);
}

TEST_CASE("test detects a strong dependence") {
  const fs::path data = generated("dep.csv", "--model gaussian_dep --coupling 1 --n 100 --seed 0");
  const Run r = cli("test --input " + data.string() + " --B 200");
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["scheme"] == "local_permutation");
  CHECK(doc["statistic"] == "hscic_trace");
  CHECK(doc["replicate_values"].size() == 200);
  CHECK(doc["p_value"].get<double>() <= 0.05);
  CHECK(doc["reject"] == true);
}

TEST_CASE("csv output") {
  const fs::path data = generated("csvout.csv", "--n 40 --seed 5");
  const Run r = cli("compute --input " + data.string() + " --measure avg_hscic --format csv");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("key,value\nmeasure,avg_hscic\n", 0) == 0);
  const Run t = cli("test --input " + data.string() + " --B 19 --format csv");
  REQUIRE(t.code == 0);
  CHECK(t.out.rfind("statistic,statistic_value,p_value", 0) == 0);
}

TEST_CASE("bench runtimes grow with n") {
  const Run r = cli("bench --repeats 2");
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  std::map<std::string, std::vector<double>> seconds;
  for (const auto& row : doc["rows"]) seconds[row["estimator"].get<std::string>()].push_back(row["seconds"]);
  CHECK(seconds.size() == 4);
  for (const auto& [name, times] : seconds) {
    CAPTURE(name);
    REQUIRE(times.size() == 4);
    for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] > times[i - 1]);
  }
}
