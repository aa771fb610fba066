#include "support.hpp"

#include "beamid/cli.hpp"
#include "beamid/errors.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace beamid;

namespace {

int run(const std::string& cmd, CommandOptions o, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(cmd, o, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

CommandOptions small(const std::filesystem::path& dir) {
  CommandOptions o;
  o.out_dir = dir;
  o.overrides = {{"grid.n_elements", "16"}, {"grid.n_steps", "64"}};
  return o;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("# comment\ngrid.n_elements = 32  # trailing\n\nnoise.level=0.01\nnoise.level = 0.02\n");
  const auto c = RunConfig::parse(in);
  CHECK(c.get_int("grid.n_elements", 0) == 32);
  CHECK(c.get_double("noise.level", 0) == 0.02);
  CHECK(c.get_double("grid.length", 1.5) == 1.5);
  CHECK(c.resolved().at("grid.length") == "1.5");

  std::istringstream bad("grid.n_elements 32\n");
  CHECK_THROWS_AS(RunConfig::parse(bad), ConfigError);

  RunConfig d;
  d.set("x", "maybe");
  CHECK_THROWS_AS(d.get_bool("x", false), ConfigError);
  d.set("y", "1e");
  CHECK_THROWS_AS(d.get_double("y", 0), ConfigError);
}

TEST_CASE("config hash follows content, not order") {
  std::istringstream a("a = 1\nb = 2\n"), b("b = 2\na = 1\n"), c("a = 1\nb = 3\n");
  CHECK(RunConfig::parse(a).hash() == RunConfig::parse(b).hash());
  std::istringstream a2("a = 1\nb = 2\n");
  CHECK(RunConfig::parse(a2).hash() != RunConfig::parse(c).hash());
}

TEST_CASE("unknown keys and bad values exit with 2") {
  const auto dir = test::scratch_dir("cli_bad");
  auto o = small(dir);
  o.overrides.emplace_back("grid.n_elemnts", "8");
  std::string err;
  CHECK(run("forward", o, &err) == kExitConfigError);
  CHECK(err.find("grid.n_elemnts") != std::string::npos);

  o = small(dir);
  o.overrides.emplace_back("coeff.mass", "-1");
  CHECK(run("forward", o) == kExitConfigError);

  CHECK(run("dance", small(dir)) == kExitConfigError);
}

TEST_CASE("missing measurement file names the path") {
  const auto dir = test::scratch_dir("cli_missing");
  auto o = small(dir);
  o.overrides.emplace_back("measurements.csv", (dir / "absent.csv").string());
  std::string err;
  CHECK(run("invert", o, &err) == kExitConfigError);
  CHECK(err.find("absent.csv") != std::string::npos);
}

TEST_CASE("verify exit codes") {
  const auto dir = test::scratch_dir("cli_verify");
  CommandOptions o;
  o.out_dir = dir;
  o.overrides = {{"verify.scenarios", "0"}};
  CHECK(run("verify", o) == kExitOk);

  o.overrides = {{"verify.scenarios", "1"}, {"verify.n_elements", "16"}, {"verify.n_steps", "128"},
                 {"verify.corrupt_adjoint_sign", "true"}};
  CHECK(run("verify", o) == kExitVerificationFailed);
  CHECK(std::filesystem::exists(dir / "report.csv"));
}

TEST_CASE("forward writes outputs and a manifest") {
  const auto dir = test::scratch_dir("cli_forward");
  auto o = small(dir);
  o.overrides.emplace_back("scenario.kind", "manufactured");
  o.seed = 12;
  REQUIRE(run("forward", o) == kExitOk);
  for (const char* f : {"outputs.csv", "field.csv", "energy.csv", "summary.txt", "manifest.txt"})
    CHECK(std::filesystem::exists(dir / f));
  std::ifstream m(dir / "manifest.txt");
  std::stringstream text;
  text << m.rdbuf();
  CHECK(text.str().find("command=forward\n") != std::string::npos);
  CHECK(text.str().find("seed=12\n") != std::string::npos);
  CHECK(text.str().find("grid.n_elements=16\n") != std::string::npos);
}

TEST_CASE("scenario output feeds invert") {
  const auto dir = test::scratch_dir("cli_pipeline");
  auto o = small(dir / "scenario");
  o.overrides.emplace_back("noise.level", "0.01");
  o.overrides.emplace_back("scenario.width", "0.1");
  REQUIRE(run("scenario", o) == kExitOk);
  CHECK(std::filesystem::exists(dir / "scenario" / "measurements_noisy.meta"));

  auto inv = small(dir / "invert");
  inv.overrides.emplace_back("measurements.csv", (dir / "scenario" / "measurements_noisy.csv").string());
  inv.overrides.emplace_back("smoothing.enabled", "false");
  inv.overrides.emplace_back("invert.mode", "full_field");
  inv.overrides.emplace_back("invert.max_iterations", "5");
  CHECK(run("invert", inv) == kExitOk);
  CHECK(std::filesystem::exists(dir / "invert" / "load.csv"));
}
