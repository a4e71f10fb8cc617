#include "doctest.h"

#include <sstream>

#include "szego/cli.hpp"
#include "szego/errors.hpp"

using namespace szego;
using namespace szego::cli;
using nlohmann::json;

TEST_CASE("TOML subset parsing") {
  const json j = parse_toml(R"(# comment
seed = 1_000
name = "a\tb"
flag = true
values = [
  1.5, -2,
  3e2,
]
point = { x = 1, y = [2, 3] }

[quadrature]
eta_grid = 32
ellipsoid.directions = 16
)");
  CHECK(j["seed"] == 1000);
  CHECK(j["name"] == "a\tb");
  CHECK(j["flag"] == true);
  CHECK(j["values"].size() == 3);
  CHECK(j["values"][2].get<double>() == 300.0);
  CHECK(j["point"]["y"][1] == 3);
  CHECK(j["quadrature"]["eta_grid"] == 32);
  CHECK(j["quadrature"]["ellipsoid"]["directions"] == 16);
}

TEST_CASE("TOML errors carry positions") {
  try {
    (void)parse_toml("a = 1\nb = [1, 2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_toml("a = \"open\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("{\"a\": }", ConfigFormat::Json), ParseError);
  CHECK(format_for_path("x/run.json") == ConfigFormat::Json);
  CHECK(format_for_path("x/run.toml") == ConfigFormat::Toml);
}

TEST_CASE("run config: unknown keys are named") {
  const json j = parse_toml("[quadrature]\neta_gird = 32\n[polynomial]\nterms = [[1.0, 2]]\n");
  CHECK_THROWS_WITH_AS(run_config_from_json(j), "unknown key 'quadrature.eta_gird'", ConfigError);
  CHECK_THROWS_AS(run_config_from_json(parse_toml("[polynomial]\nterms = [[1.0, 2]]\ntext = \"1 2\"\n")), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(parse_toml("seed = \"x\"\n")), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(parse_toml("[polynomial]\ntext = \"\"\n")), ParseError);
}

TEST_CASE("run config normalised form round trips") {
  const json j = parse_toml(R"(seed = 5
threads = 2
pairs = [["x=[1] y=[0] t=0", "x=[-1] y=[0] t=0"]]
[polynomial]
terms = [[1.0, 2], [0.5, 4]]
[quadrature]
eta_grid = 40
inner = "laplace"
[verify]
suites = ["bnw"]
corpus = [{ name = "sq", terms = [[1.0, 2]] }]
)");
  const RunConfig a = run_config_from_json(j);
  CHECK(a.seed == 5);
  CHECK(a.threads == 2);
  CHECK(a.quadrature.eta_grid == 40);
  CHECK(a.quadrature.inner == InnerMethod::Laplace);
  CHECK(a.pairs.size() == 1);
  CHECK(a.suites == std::vector<std::string>{"bnw"});
  const json n = a.to_json();
  const RunConfig b = run_config_from_json(n);
  CHECK(b.to_json() == n);
  CHECK(*b.polynomial == *a.polynomial);
}

TEST_CASE("overrides") {
  RunConfig c;
  Overrides o;
  o.seed = 9;
  o.threads = 3;
  o.refine = true;
  o.suites = {"decay"};
  apply_overrides(c, o);
  CHECK(c.seed == 9);
  CHECK(c.threads == 3);
  CHECK(c.refine);
  CHECK(c.suites == std::vector<std::string>{"decay"});
  Overrides bad;
  bad.suites = {"nope"};
  CHECK_THROWS_AS(apply_overrides(c, bad), ConfigError);
}

TEST_CASE("poly check reports acceptance and rejection") {
  std::ostringstream data, info;
  RunConfig c = run_config_from_json(parse_toml("[polynomial]\ntext = \"1 2 0\\n1 1 1\\n1 2 2\\n1 4 0\\n1 0 6\"\n"));
  CHECK(cmd_poly_check(c, data, info) == kExitOk);
  CHECK(data.str().find("combined degree (2,3)") != std::string::npos);
  std::ostringstream d2;
  c = run_config_from_json(parse_toml("[polynomial]\ntext = \"1 2 0\\n1 2 3\\n1 4 0\\n1 0 6\"\n"));
  CHECK(cmd_poly_check(c, d2, info) == kExitOk);
  CHECK(d2.str().find("rejected") != std::string::npos);
}

TEST_CASE("kernel eval writes a diagonal pair as an error row") {
  const RunConfig c = run_config_from_json(parse_toml(R"(pairs = [["x=[0] y=[0] t=0", "x=[0] y=[0] t=0"], ["x=[1] y=[0] t=0", "x=[-1] y=[0] t=0"]]
[polynomial]
terms = [[1.0, 2]]
)"));
  std::ostringstream data, info;
  CHECK(cmd_kernel_eval(c, data, info) == kExitOk);
  const std::string csv = data.str();
  CHECK(csv.find("on-diagonal evaluation") != std::string::npos);
  CHECK(csv.find("\n1,2,0,0,") != std::string::npos);
}

TEST_CASE("commands reject incomplete configs") {
  std::ostringstream data, info;
  CHECK_THROWS_AS(cmd_sweep(RunConfig{}, data, info), ConfigError);
  const RunConfig np = run_config_from_json(parse_toml("[polynomial]\nterms = [[1.0, 2]]\n"));
  CHECK_THROWS_AS(cmd_kernel_eval(np, data, info), ConfigError);
  const RunConfig mism = run_config_from_json(parse_toml("pairs = [[\"x=[0,0] y=[0,0] t=0\", \"x=[1,0] y=[0,0] t=0\"]]\n[polynomial]\nterms = [[1.0, 2]]\n"));
  CHECK_THROWS_AS(cmd_kernel_eval(mism, data, info), ConfigError);
}

TEST_CASE("verify command returns a report and exit code") {
  const RunConfig c = run_config_from_json(parse_toml(R"([verify]
suites = ["bnw", "appendix"]
corpus = [{ name = "sq", terms = [[1.0, 2]] }, { name = "w", terms = [[1.0, 2], [-1.0, 3], [1.0, 4]] }]
)"));
  std::ostringstream data, info;
  CHECK(cmd_verify(c, data, info) == kExitOk);
  const json j = json::parse(data.str());
  CHECK(j["reports"].size() == 2);
  CHECK(j["reports"][0]["suite"] == "bnw");
  CHECK(info.str().find("C_M = ") != std::string::npos);
}
