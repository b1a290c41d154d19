#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "quadcurl/study.hpp"

using namespace quadcurl;

TEST_CASE("rates and slopes") {
  CHECK(rate(4.0, 1.0) == doctest::Approx(2.0));
  CHECK(std::isnan(rate(0.0, 1.0)));
  CHECK(loglog_slope({1.0, 0.5, 0.25}, {1.0, 16.0, 256.0}) == doctest::Approx(-4.0));
}

TEST_CASE("configuration checks") {
  StudyConfig c;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.n_list = {10, 20};
  CHECK_NOTHROW(validate(c));
  c.example = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.example = 3;
  c.n_list = {10, 30};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.n_list = {10, -20};
  CHECK_THROWS_AS(validate(c), ConfigError);

  StudyConfig g;
  g.example = 2;
  CHECK(g.effective_gamma() == doctest::Approx(0.01));
  g.example = 4;
  CHECK(g.effective_gamma() == 0.0);
  g.gamma = 0.5;
  CHECK(g.effective_gamma() == 0.5);

  CHECK(parse_mode("condition") == StudyMode::Condition);
  CHECK(parse_format("json") == OutputFormat::Json);
  CHECK_THROWS_AS(parse_mode("fast"), ConfigError);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("convergence ladder") {
  StudyConfig c;
  c.example = 1;
  c.n_list = {20, 40};
  const StudyResult r = run_study(c);
  REQUIRE(r.rows.size() == 2);
  CHECK_FALSE(r.rows[0].rates.has_value());
  REQUIRE(r.rows[1].rates.has_value());
  CHECK(r.rows[1].rates->l2 > 1.8);
  CHECK(r.rows[1].rates->l2 < 2.5);
  CHECK(r.rows[1].errors.l2 < r.rows[0].errors.l2);

  std::ostringstream a, b;
  write_csv(r, a);
  write_csv(run_study(c), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("n,h,dofs,e_l2,rate_l2", 0) == 0);

  std::ostringstream js;
  write_json(r, js);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j.at("rows").size() == 2);
  CHECK(j.at("config").at("n") == nlohmann::json::array({20, 40}));

  std::ostringstream md;
  write_markdown(r, md);
  CHECK(md.str().find("| n |") != std::string::npos);
}

TEST_CASE("parallel ladder matches the sequential one") {
  StudyConfig c;
  c.example = 4;
  c.n_list = {8, 16};
  c.alpha_plus = 10.0;
  std::ostringstream a, b;
  write_csv(run_study(c), a);
  c.parallel = true;
  write_csv(run_study(c), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("condition ladder") {
  StudyConfig c;
  c.example = 3;
  c.mode = StudyMode::Condition;
  c.n_list = {10, 20};
  const StudyResult r = run_study(c);
  REQUIRE(r.condition.size() == 2);
  REQUIRE(r.slopes.has_value());
  const double ratio = std::log2(r.condition[1].report.cond / r.condition[0].report.cond);
  CHECK(ratio > 5.3);
  CHECK(ratio < 6.5);
}
