#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/commands.hpp"

using namespace s3tori::cli;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json run_json(std::vector<std::string> args, int expected) {
  const std::string path = temp_path("s3tori_cli_report.json");
  std::filesystem::remove(path);
  args.push_back("--json");
  args.push_back(path);
  const Run r = run(args);
  CHECK(r.code == expected);
  REQUIRE(std::filesystem::exists(path));
  const json j = json::parse(slurp(path));
  std::filesystem::remove(path);
  return j;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == kUsage);
  CHECK(run({"frobnicate"}).code == kUsage);
  CHECK(run({"classify", "--resolution", "100", "--pole", "0,1,0,0"}).code == kUsage);
  CHECK(run({"classify", "--resolution", "1024", "--pole", "0,1,0,0"}).code == kUsage);
  CHECK(run({"classify"}).code == kUsage);
  CHECK(run({"classify", "--pole", "0,1,0"}).code == kUsage);
  CHECK(run({"classify", "--pole", "0,0,0,0"}).code == kUsage);
  CHECK(run({"classify", "--surface", "torus", "--pole", "0,1,0,0"}).code == kUsage);
  CHECK(run({"classify", "--surface", "homogeneous:2", "--pole", "0,1,0,0"}).code == kUsage);
  CHECK(run({"spectrum", "--resolution", "32", "--count", "5000"}).code == kUsage);
  CHECK(run({"scan", "--tol-margin", "-1"}).code == kUsage);
  CHECK(run({"tau", "--alpha", "0"}).code == kUsage);
  CHECK(run({"tau", "--samples", "100"}).code == kUsage);
  CHECK(run({"tau", "--map", "spin:3"}).code == kUsage);
}

TEST_CASE("help and version") {
  const Run h = run({"--help"});
  CHECK(h.code == kPass);
  CHECK(h.out.find("verify-clifford") != std::string::npos);
  const Run v = run({"--version"});
  CHECK(v.code == kPass);
  CHECK_FALSE(v.out.empty());
}

TEST_CASE("classify reports the intersection type") {
  const json two = run_json({"classify", "--pole", "0,1,0,0", "--resolution", "64"}, kPass);
  CHECK(two["intersection"]["type"] == 2);
  CHECK(two["pass"] == true);
  CHECK(two["intersection"]["curves"].size() == 2);
  CHECK(two["config"]["resolution"] == 64);
  CHECK(two["tool"] == "s3tori");
  CHECK(two.contains("version"));

  const json four = run_json({"classify", "--pole", "1,0,1,0", "--resolution", "64"}, kPass);
  CHECK(four["intersection"]["type"] == 4);
  CHECK(four["intersection"]["tangencies"].size() == 2);
}

TEST_CASE("failed checks exit with 1 and report pass false") {
  const json j = run_json({"verify-clifford", "--resolution", "32", "--samples", "20",
                           "--tol-lambda", "1e-15"},
                          kCheckFail);
  CHECK(j["pass"] == false);
  CHECK(j["checks"]["lambda1_equals_two"]["pass"] == false);
}

TEST_CASE("numerical failures exit with 3") {
  // The projection pole lies on the Clifford torus.
  const json j = run_json({"project", "--pole", "0,1,0,0", "--projection-pole", "1,0,1,0",
                           "--resolution", "64"},
                          kNumerical);
  CHECK(j["pass"] == false);
  CHECK(j.contains("error"));
}

TEST_CASE("spectra of homogeneous tori") {
  const json j = run_json({"spectrum", "--surface", "homogeneous:0.5235987755982988",
                           "--resolution", "64", "--count", "4"},
                          kPass);
  CHECK(j["spectrum"]["eigenvalues"][1].get<double>() == doctest::Approx(4.0 / 3).epsilon(2e-3));
  CHECK(j["montiel_ros"]["applicable"] == false);
}

TEST_CASE("reports are byte-identical across runs") {
  const std::string path = temp_path("s3tori_cli_repeat.json");
  const std::vector<std::string> args{"scan",  "--samples", "40", "--resolution", "32",
                                      "--seed", "3",        "--json", path};
  CHECK(run(args).code == kPass);
  const std::string first = slurp(path);
  CHECK(run(args).code == kPass);
  CHECK(slurp(path) == first);
  CHECK(json::parse(first)["pass"] == true);
  std::filesystem::remove(path);
}

TEST_CASE("project writes figures") {
  const std::string ply = temp_path("s3tori_cli.ply");
  const std::string svg = temp_path("s3tori_cli.svg");
  const json j = run_json({"project", "--pole", "0,1,0,0", "--resolution", "64", "--ply", ply,
                           "--svg", svg},
                          kPass);
  CHECK(j["projection"]["plane_residual"].get<double>() < 1e-8);
  CHECK(slurp(ply).rfind("ply\n", 0) == 0);
  CHECK(slurp(svg).find("class=\"curve\"") != std::string::npos);
  std::filesystem::remove(ply);
  std::filesystem::remove(svg);
}

TEST_CASE("tau of the identity") {
  const json j = run_json({"tau"}, kPass);
  CHECK(j["tau"]["tau"] == 0.0);
}

TEST_CASE("parse_vec4") {
  CHECK(parse_vec4("1,2,3,4") == s3tori::Vec4(1, 2, 3, 4));
  CHECK_THROWS(parse_vec4("1,2,3"));
  CHECK_THROWS(parse_vec4("1,2,3,x"));
}
