#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "ivac/report.hpp"
#include "ivac/scenario.hpp"

using namespace ivac;

namespace {
const char* kGoodConfig = R"(# toy setup
[grid]
eps1 = 1.0
q_ratio = 0.5
n_shells = 8
nodes_per_shell = 12
uv_cutoff = 64.0

[kpr]
b_alpha = 1.0
l_max = 8

[charge]
q = 1.0
r1 = 1.0
r2 = 2.0

[probe]
isotropic = true

[outputs]
dir = "out"
write_csv = false
)";
}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("config parsing: values, comments, strings") {
    std::vector<std::string> errors;
    const ScenarioConfig c = parse_config(kGoodConfig, errors);
    REQUIRE(errors.empty());
    CHECK(c.grid.n_shells == 8);
    CHECK(c.grid.nodes_per_shell == 12);
    CHECK(c.kpr.l_max == 8);
    CHECK(c.kpr.b_alpha == 1.0);
    CHECK(c.probe.isotropic);
    CHECK(c.outputs.dir == "out");
    CHECK(!c.outputs.write_csv);
    CHECK(validate_config(c).empty());
  }

  TEST_CASE("config parsing: defaults survive an empty file") {
    std::vector<std::string> errors;
    const ScenarioConfig c = parse_config("", errors);
    CHECK(errors.empty());
    CHECK(c.grid.n_shells == 20);
    CHECK(c.charge.q == 1.0);
    CHECK(validate_config(c).empty());
  }

  TEST_CASE("config parsing: malformed input is reported with line numbers") {
    std::vector<std::string> errors;
    parse_config("[grid]\nepsx = 1.0\n", errors);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("line 2") != std::string::npos);
    CHECK(errors[0].find("unknown key") != std::string::npos);

    errors.clear();
    parse_config("[nosuch]\n", errors);
    CHECK(!errors.empty());

    errors.clear();
    parse_config("[grid]\neps1 = 1.0\neps1 = 2.0\n", errors);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("duplicate") != std::string::npos);

    errors.clear();
    parse_config("[grid]\nn_shells = lots\n", errors);
    CHECK(!errors.empty());

    errors.clear();
    parse_config("eps1 = 1.0\n", errors);  // key before any section
    CHECK(!errors.empty());
  }

  TEST_CASE("validation rejects out-of-range physics") {
    std::vector<std::string> errors;
    ScenarioConfig c = parse_config(kGoodConfig, errors);
    REQUIRE(errors.empty());
    c.kpr.b_alpha = 0.4;
    bool alpha_flagged = false;
    for (auto& e : validate_config(c))
      if (e.find("b_alpha") != std::string::npos) alpha_flagged = true;
    CHECK(alpha_flagged);

    c = parse_config(kGoodConfig, errors);
    c.grid.q_ratio = 1.5;
    CHECK(!validate_config(c).empty());
    c = parse_config(kGoodConfig, errors);
    c.charge.r1 = 3.0;  // r1 > r2
    CHECK(!validate_config(c).empty());
    c = parse_config(kGoodConfig, errors);
    c.cone.axis = "x";
    CHECK(!validate_config(c).empty());
  }

  TEST_CASE("json writer: ordered keys, stable numbers") {
    Json o = Json::object();
    o.set("b", Json::num(0.5));
    o.set("a", Json::integer(3));
    Json arr = Json::array();
    arr.push(Json::num(1.0));
    arr.push(Json::boolean(false));
    o.set("list", std::move(arr));
    o.set("name", Json::str("x\"y"));
    const std::string s = o.dump(0);
    CHECK(s.find("\"b\"") < s.find("\"a\""));  // insertion order, not sorted
    CHECK(s.find("0.5") != std::string::npos);
    CHECK(s.find("\\\"") != std::string::npos);  // quote escaped
    CHECK(Json::num(std::nan("")).dump(0) == "null\n");  // dump ends files with a newline
  }

  TEST_CASE("csv writer") {
    Csv c({"x", "y"});
    c.add_row({1.0, 2.5});
    const std::string s = c.dump();
    CHECK(s.find("x,y\n") == 0);
    CHECK(s.find("2.5") != std::string::npos);
    CHECK_THROWS(c.add_row({1.0}));
  }

  TEST_CASE("unknown scenario is rejected") {
    std::vector<std::string> errors;
    const ScenarioConfig c = parse_config(kGoodConfig, errors);
    RunOptions opt;
    CHECK_THROWS_AS(static_cast<void>(run_scenario("nope", c, opt)), std::invalid_argument);
    CHECK(is_scenario("full-suite"));
    CHECK(!is_scenario("nope"));
  }

  TEST_CASE("inadmissible ladder turns into a negative verdict, not a crash") {
    std::vector<std::string> errors;
    ScenarioConfig c = parse_config(kGoodConfig, errors);
    c.kpr.b_alpha = 0.4;
    RunOptions opt;
    const ScenarioOutcome o = run_scenario("infravacuum-verify", c, opt);
    CHECK(!o.passed);
    CHECK(!o.lines.empty());
  }

  TEST_CASE("negative control of the admissibility gate passes by rejecting") {
    std::vector<std::string> errors;
    const ScenarioConfig c = parse_config(kGoodConfig, errors);
    RunOptions opt;
    opt.negative_control = true;
    const ScenarioOutcome o = run_scenario("infravacuum-verify", c, opt);
    CHECK(o.passed);
  }

  TEST_CASE("sector scenario runs end to end on a small config") {
    std::vector<std::string> errors;
    ScenarioConfig c = parse_config(kGoodConfig, errors);
    REQUIRE(errors.empty());
    RunOptions opt;
    const ScenarioOutcome o = run_scenario("sector-test", c, opt);
    for (auto& l : o.lines) {
      INFO(l);
      CHECK(l.find("[FAIL]") == std::string::npos);
    }
    CHECK(o.passed);
    CHECK(o.report.dump().find("\"scenario\": \"sector-test\"") != std::string::npos);
  }
}
