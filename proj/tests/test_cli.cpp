#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "plectic/integrate.hpp"
#include "testutil.hpp"

using namespace plectic;

namespace {

struct Run {
  int code;
  std::string out, err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

std::filesystem::path tmp(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "plectic_cli_test";
  std::filesystem::create_directories(d);
  return d / name;
}

Run cli(const std::string& args) {
  const char* exe = std::getenv("PLECTIC_CLI");
  REQUIRE(exe != nullptr);
  std::string out = tmp("stdout").string(), err = tmp("stderr").string();
  std::string cmd = std::string(exe) + " " + args + " >" + out + " 2>" + err;
  int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return testutil::data_dir() + "/" + name; }

}  // namespace

TEST_CASE("point-side prints the introductory value up to sign") {
  Run r = cli("point-side --fixture " + data("point_side_intro.json"));
  CHECK(r.code == 0);
  bool plus = r.out.find("2·3² + 3⁶ + 2·3⁷ + 3⁹ + O(3¹⁰)·(√−1⊗√−1)") != std::string::npos;
  bool minus = r.out.find("3² + 2·3³ + 2·3⁴ + 2·3⁵ + 3⁶ + 2·3⁸ + 3⁹ + O(3¹⁰)·(√−1⊗√−1)") != std::string::npos;
  CHECK((plus || minus));
}

TEST_CASE("truncated fixture exits with the schema error code") {
  std::string full = slurp(data("synthetic_fixture.json"));
  REQUIRE(full.size() > 100);
  std::ofstream(tmp("trunc.json")) << full.substr(0, full.size() / 2);
  Run r = cli("check-fixture --fixture " + tmp("trunc.json").string());
  CHECK(r.code == 2);
  auto j = nlohmann::json::parse(r.err);
  CHECK(j["error"] == "SchemaError");
  CHECK(j["schema"] == 1);
  CHECK(cli("check-fixture --fixture " + data("synthetic_fixture.json")).code == 0);
}

TEST_CASE("compare of equal dumps agrees") {
  Run a = cli("point-side --emit-json --fixture " + data("point_side_second.json"));
  REQUIRE(a.code == 0);
  std::ofstream(tmp("a.json")) << a.out;
  Run r = cli("compare --input " + tmp("a.json").string() + " --golden " + tmp("a.json").string());
  CHECK(r.code == 0);
  CHECK(r.out.find("agree to O(3^10)") != std::string::npos);
}

TEST_CASE("compare works up to sign, swap and conjugation") {
  Run a = cli("point-side --emit-json --fixture " + data("point_side_intro.json"));
  REQUIRE(a.code == 0);
  TensorValue v = tensor_from_json(nlohmann::json::parse(a.out)["value"]);
  TensorValue w = (-v).swapped().conjugated(2);
  std::ofstream(tmp("w.json")) << to_json(w).dump();
  Run r = cli("compare --input " + tmp("w.json").string() + " --golden " + tmp("w.json").string());
  CHECK(r.code == 0);
  std::ofstream(tmp("v.json")) << a.out;
  r = cli("compare --input " + tmp("v.json").string() + " --golden " + tmp("w.json").string());
  CHECK(r.code == 0);
  r = cli("compare --input " + tmp("v.json").string() + " --golden " + data("golden_point_side_second.json"));
  CHECK(r.code == 11);
  CHECK(r.out.find("disagree") != std::string::npos);
}

TEST_CASE("second instance against the golden file") {
  Run r = cli("point-side --fixture " + data("point_side_second.json") + " --golden " +
              data("golden_point_side_second.json") + " --digits 7");
  CHECK(r.code == 0);
  CHECK(r.out.find("golden: agree to") != std::string::npos);
}

TEST_CASE("harmonize then integrate equals the full pipeline") {
  std::string fx = tmp("synth.json").string();
  REQUIRE(cli("synth-fixture --out " + fx + " --depth 3 --kappa unit").code == 0);
  std::string dumpf = tmp("cochain.json").string();
  Run h = cli("harmonize --fixture " + fx + " --depth 3 --prec 6 --out " + dumpf);
  REQUIRE(h.code == 0);
  Run i = cli("integrate --emit-json --fixture " + fx + " --prec 6 --cochain " + dumpf);
  REQUIRE(i.code == 0);
  Run p = cli("plectic --emit-json --fixture " + fx + " --depth 3 --prec 6 --threads 2");
  REQUIRE(p.code == 0);
  auto ji = nlohmann::json::parse(i.out), jp = nlohmann::json::parse(p.out);
  CHECK(ji["schema"] == 1);
  CHECK(ji["digest"] == jp["diagnostics"]["cochain"]["digest"]);
  CHECK(tensor_from_json(ji["value"]) == tensor_from_json(jp["value"]));
  CHECK(jp["diagnostics"]["harmonize"]["solver"].contains("pivots"));
}

TEST_CASE("error classes map to exit codes") {
  std::string fx = tmp("synth2.json").string();
  REQUIRE(cli("synth-fixture --out " + fx + " --depth 2").code == 0);
  Run r = cli("plectic --fixture " + fx + " --depth 3");
  CHECK(r.code == 4);
  CHECK(nlohmann::json::parse(r.err)["error"] == "DepthExceeded");
  CHECK(cli("check-fixture --fixture " + tmp("missing.json").string()).code == 2);
  CHECK(cli("plectic --fixture " + fx + " --depth 0").code == 16);
  CHECK(cli("no-such-command").code != 0);
}
