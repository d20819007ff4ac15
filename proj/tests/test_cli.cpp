#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "subspec/catalog.hpp"
#include "subspec/classification.hpp"
#include "subspec/cli.hpp"
#include "subspec/cocycle.hpp"

using namespace subspec;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "subspec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Data rows of a CSV grid (comment and header lines dropped).
std::vector<std::vector<double>> rows(const std::string& csv) {
  std::vector<std::vector<double>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '-')) continue;
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    out.push_back(r);
  }
  return out;
}

const json& criterion(const json& rep, const std::string& id) {
  for (const auto& c : rep["classification"]["criteria"])
    if (c["id"] == id) return c;
  FAIL("criterion missing: " << id);
  static json none;
  return none;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("analyze") {
  const auto r = run({"analyze", "catalog:thue-morse"});
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["schema"] == "subspec-report/1");
  CHECK(rep["matrix"] == json::parse("[[1,1],[1,1]]"));
  CHECK(criterion(rep, "bijective")["verdict"] == "holds");
  CHECK(criterion(rep, "sqrtq-singularity")["verdict"] == "holds");
  CHECK(criterion(rep, "sqrtq-singularity")["theorem"] == "berlinkov-solomyak-sqrtq");
  CHECK(criterion(rep, "weak-mixing-self-similar")["verdict"] == "fails");
  const auto tags = all_theorem_tags();
  for (const auto& c : rep["classification"]["criteria"])
    CHECK(std::find(tags.begin(), tags.end(), c["theorem"].get<std::string>()) != tags.end());
  // round trip
  CHECK(json::parse(rep.dump(2)).dump(2) == rep.dump(2));
  CHECK(rep.dump(2) + "\n" == r.out);

  const auto pd = json::parse(run({"analyze", "catalog:period-doubling"}).out);
  CHECK(pd["classification"]["headline"].get<std::string>().rfind("discrete", 0) == 0);
  const auto inline_rules = run({"analyze", "--rule", "0->01", "--rule", "1->10"});
  REQUIRE(inline_rules.code == 0);
  CHECK(json::parse(inline_rules.out)["matrix"] == rep["matrix"]);
  CHECK(run({"analyze"}).code == 1);
  const auto fam = run({"analyze", "catalog:family-01k?k=4"});
  CHECK(fam.code == 0);
  CHECK(json::parse(fam.out)["matrix"] == json::parse("[[1,1],[4,0]]"));
}

TEST_CASE("input and precondition errors") {
  const auto bad = temp_file("subspec_bad.txt", "0 -> 0 1\n1 -> 0 # ok\n2 -> 3\n");
  const auto r = run({"analyze", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(run({"analyze", "/nonexistent/rules.txt"}).code == 1);
  CHECK(run({"analyze", "catalog:no-such-rule"}).code == 1);
  const auto np = temp_file("subspec_np.txt", "0 -> 0 1\n1 -> 1\n");
  CHECK(run({"analyze", np.string()}).code == 2);
  CHECK(run({"lyapunov", "catalog:fibonacci", "--samples", "0"}).code == 2);
  CHECK(run({"scan", "catalog:fibonacci", "--range", "1", "1"}).code == 2);
  CHECK(run({"analyze", "catalog:fibonacci", "--bogus"}).code == 1);
  CHECK(run({"riesz", "catalog:thue-morse", "--scalar", "1,2,3"}).code == 1);
}

TEST_CASE("riesz") {
  const auto r = run({"riesz", "catalog:thue-morse", "--scalar", "1,-1", "--level", "12", "--grid", "4096"});
  REQUIRE(r.code == 0);
  std::ostringstream tm;
  tm_scalar_riesz(12, FrequencyGrid{0, 1, 4096}).write_csv(tm);
  const auto a = rows(r.out), b = rows(tm.str());
  REQUIRE(a.size() == 4096);
  REQUIRE(b.size() == 4096);
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i][0] == b[i][0]);
    worst = std::max(worst, std::abs(a[i][1] - b[i][1]));
  }
  CHECK(worst < 1e-9);
  const auto flat = rows(run({"riesz", "catalog:thue-morse", "--scalar", "1,-1", "--level", "0", "--grid", "32"}).out);
  for (const auto& row : flat) CHECK(row[1] == doctest::Approx(flat[0][1]));
  const auto fib = rows(run({"riesz", "catalog:fibonacci", "--level", "12", "--grid", "4096"}).out);
  double integral = 0;
  for (const auto& row : fib) integral += row[1] / 4096;  // re_00
  CHECK(std::abs(integral - 0.618) < 5e-2);
  const auto js = run({"riesz", "catalog:thue-morse", "--scalar", "1,-1", "--level", "3", "--grid", "8", "--format", "json"});
  CHECK(json::parse(js.out)["density"].size() == 8);
}

TEST_CASE("lyapunov") {
  const auto r = run({"lyapunov", "catalog:non-pisot-0111", "--depth", "6", "--samples", "100000", "--seed", "42"});
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["verdict"]["verdict"] == "holds");
  CHECK(rep["verdict"]["statement"] == "singular");
  CHECK(rep["verdict"]["theorem"] == "lyapunov-half-log-theta");
  CHECK(rep["exponent"]["seed"] == 42);
  const auto tm = json::parse(run({"lyapunov", "catalog:thue-morse"}).out);
  CHECK(tm["verdict"]["verdict"] == "not-applicable");
  // identical output whatever the worker count
  const auto one = run({"lyapunov", "catalog:fibonacci", "--samples", "5000", "--threads", "1", "--format", "csv"});
  const auto three = run({"lyapunov", "catalog:fibonacci", "--samples", "5000", "--threads", "3", "--format", "csv"});
  CHECK(one.out == three.out);
  CHECK(one.out.rfind("k,estimate,stderr,samples,seed\n", 0) == 0);
  CHECK(rows(one.out).size() == 6);
  setenv("SUBSPEC_SEED", "77", 1);
  const auto env = json::parse(run({"lyapunov", "catalog:fibonacci", "--samples", "1000"}).out);
  unsetenv("SUBSPEC_SEED");
  CHECK(env["exponent"]["seed"] == 77);
  CHECK(json::parse(run({"lyapunov", "catalog:fibonacci", "--samples", "1000"}).out)["exponent"]["seed"] == 1);
}

TEST_CASE("scan") {
  const auto r = run({"scan", "catalog:period-doubling", "--range", "0", "1", "--grid", "4096"});
  REQUIRE(r.code == 0);
  const auto data = rows(r.out);
  REQUIRE(data.size() == 4096);
  for (std::size_t i = 0; i < 4096; i += 256) CHECK(data[i][2] == 1);
  const auto nz = json::parse(run({"scan", "catalog:non-pisot-0111", "--self-similar", "--format", "json"}).out);
  CHECK(nz["candidates"] == json::parse("[0.0]"));
}

TEST_CASE("catalog") {
  const auto r = run({"catalog"});
  CHECK(r.code == 0);
  CHECK(r.out == "thue-morse\nfibonacci\nrudin-shapiro\nperiod-doubling\nbijective-3\nnon-pisot-0111\nfamily-01k\n");
  CHECK(run({"catalog", "catalog:family-01k?k=5"}).out == "0 -> 011111\n1 -> 0\n");
  CHECK(run({"catalog", "nonesuch"}).code == 1);
}

TEST_CASE("diffract and bernoulli") {
  const auto d = run({"diffract", "catalog:fibonacci", "--self-similar", "--window", "2000", "--range", "-2", "2",
                      "--grid", "64", "--format", "json"});
  REQUIRE(d.code == 0);
  CHECK(json::parse(d.out)["mass_at_zero"].get<double>() > 0);
  const auto b = run({"bernoulli", "--lambda", "0.5", "--p", "0.5", "--range", "0.25", "0.5", "--grid", "1", "--terms", "200"});
  REQUIRE(b.code == 0);
  const auto v = rows(b.out);
  REQUIRE(v.size() == 1);
  CHECK(std::abs(v[0][3]) < 1e-12);
}
