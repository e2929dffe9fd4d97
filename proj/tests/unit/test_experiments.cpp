// Tests for the Monte-Carlo harness: scoring, scenario runs, sweeps, and
// table emission.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "mfdoa/experiments.hpp"

using namespace mfdoa;

namespace {

bool rows_equal(const ResultRow& a, const ResultRow& b) {
  return a.scenario_id == b.scenario_id && a.sweep_axis == b.sweep_axis &&
         a.sweep_value == b.sweep_value && a.rmse_deg == b.rmse_deg &&
         a.mean_iters == b.mean_iters && a.mean_solve_ms == b.mean_solve_ms &&
         a.n_failed == b.n_failed && a.n_collision_pairs == b.n_collision_pairs &&
         a.trial_estimates == b.trial_estimates;
}

bool tables_equal(const ResultTable& a, const ResultTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    if (!rows_equal(a.rows[i], b.rows[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("rmse scoring follows the capped positional convention", "[experiments]") {
  SECTION("perfect estimates score zero") {
    CHECK(rmse({{88.0, 93.0}}, {{88.0, 93.0}}) == 0.0);
  }
  SECTION("a 20 degree miss hits the 10 degree cap") {
    CHECK(rmse({{110.0}}, {{90.0}}) == Catch::Approx(10.0).margin(1e-12));
  }
  SECTION("two trials with 3 and 4 degree errors") {
    CHECK(rmse({{93.0}, {94.0}}, {{90.0}, {90.0}}) ==
          Catch::Approx(std::sqrt((9.0 + 16.0) / 2.0)).margin(1e-12));
    CHECK(rmse({{93.0}, {94.0}}, {{90.0}, {90.0}}) == Catch::Approx(3.5355339059).margin(1e-9));
  }
  SECTION("lists are sorted before pairing") {
    CHECK(rmse({{120.0, 60.0}}, {{60.0, 120.0}}) == 0.0);
  }
  SECTION("trial order does not change the score") {
    const std::vector<std::vector<double>> est = {{80.0}, {95.0}, {140.0}};
    const std::vector<std::vector<double>> tru = {{79.0}, {97.0}, {139.5}};
    const double a = rmse(est, tru);
    const double b = rmse({est[2], est[0], est[1]}, {tru[2], tru[0], tru[1]});
    CHECK(a == Catch::Approx(b).margin(1e-15));
  }
  SECTION("length mismatches are scoring errors") {
    CHECK_THROWS_AS(rmse({{90.0}}, {{90.0}, {91.0}}), dim_error);
    CHECK_THROWS_AS(rmse({{90.0, 91.0}}, {{90.0}}), dim_error);
  }
}

TEST_CASE("run_scenario recovers a single noise-free source", "[experiments]") {
  Scenario s;
  s.id = "single";
  s.geometry = GeometryConfig::uniform(8, 2);
  s.thetas_deg = {96.0};
  s.mc = 1;
  s.seed = 11;
  const ResultTable t = run_scenario(s);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].sweep_axis == "none");
  CHECK(t.rows[0].sweep_value == 0.0);
  CHECK(t.rows[0].rmse_deg <= 0.01);
  CHECK(t.rows[0].n_failed == 0);
  CHECK(t.rows[0].mean_iters > 0.0);
  CHECK(t.rows[0].mean_solve_ms == 0.0);  // timing defaults to the 0 sentinel
}

TEST_CASE("run_scenario matches the wide-aperture exact-recovery oracle", "[experiments]") {
  Scenario s;
  s.id = "wide";
  s.geometry = GeometryConfig::uniform(16, 2);
  s.thetas_deg = {72.5};
  s.mc = 1;
  s.seed = 3;
  const ResultTable t = run_scenario(s);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].rmse_deg <= 0.01);
  CHECK(t.rows[0].n_failed == 0);
}

TEST_CASE("identical scenarios give identical tables", "[experiments]") {
  Scenario s;
  s.id = "det";
  s.geometry = GeometryConfig::uniform(6, 2);
  s.k_random = 2;
  s.min_sep_cos = 0.1;
  s.snr_db = {20.0};
  s.n_snapshots = 3;
  s.mc = 4;
  s.seed = 99;
  s.keep_trials = true;
  const ResultTable a = run_scenario(s);
  const ResultTable b = run_scenario(s);
  CHECK(tables_equal(a, b));
  REQUIRE(a.rows.size() == 1);
  CHECK(a.rows[0].sweep_axis == "snr");
  CHECK(a.rows[0].sweep_value == 20.0);
  CHECK(a.rows[0].rmse_deg <= 10.0);
  CHECK(a.rows[0].trial_estimates.size() == 4);

  SECTION("thread count does not change the result") {
    Scenario s1 = s, s4 = s;
    s1.threads = 1;
    s4.threads = 4;
    CHECK(tables_equal(run_scenario(s1), run_scenario(s4)));
  }
}

TEST_CASE("failed trials score at the cap", "[experiments]") {
  Scenario s;
  s.geometry = GeometryConfig::uniform(5, 1);
  s.thetas_deg = {75.0};
  s.mc = 3;
  s.solver.max_iter = 1;  // force solver non-convergence
  const ResultTable t = run_scenario(s);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].n_failed == 3);
  CHECK(t.rows[0].rmse_deg == Catch::Approx(10.0).margin(1e-12));
}

TEST_CASE("scenario validation happens before any trial runs", "[experiments]") {
  Scenario base;
  base.geometry = GeometryConfig::uniform(4, 1);
  base.thetas_deg = {80.0};

  Scenario s = base;
  s.mc = 0;
  CHECK_THROWS_AS(validate_scenario(s), config_error);

  s = base;
  s.n_snapshots = 0;
  CHECK_THROWS_AS(validate_scenario(s), config_error);

  s = base;
  s.k_est = 4;  // product set has 4 elements; split needs k <= 3
  CHECK_THROWS_AS(validate_scenario(s), config_error);

  s = base;
  s.geometry = GeometryConfig({0, 1, 3}, {1});
  s.estimator = Estimator::full_primal;
  CHECK_THROWS_AS(validate_scenario(s), config_error);

  s = base;
  s.thetas_deg.clear();
  CHECK_THROWS_AS(validate_scenario(s), config_error);  // no sources at all

  s = base;
  s.thetas_deg = {80.0};
  s.powers = {1.0, 2.0};
  CHECK_THROWS_AS(validate_scenario(s), config_error);
}

TEST_CASE("sweeps label axes and share trial seeds", "[experiments]") {
  Scenario s;
  s.geometry = GeometryConfig::uniform(6, 2);
  s.thetas_deg = {83.0};
  s.mc = 2;
  s.seed = 7;

  SECTION("length-1 snr sweep equals run_scenario") {
    const ResultTable a = sweep(s, SweepAxis::snr, {15.0});
    Scenario s2 = s;
    s2.snr_db = {15.0};
    CHECK(tables_equal(a, run_scenario(s2)));
  }
  SECTION("snapshot sweep produces one row per value") {
    const ResultTable t = sweep(s, SweepAxis::n_snapshots, {1.0, 2.0, 4.0});
    REQUIRE(t.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(t.rows[i].sweep_axis == "n_snapshots");
      CHECK(t.rows[i].rmse_deg <= 10.0);
    }
    CHECK(t.rows[0].sweep_value == 1.0);
    CHECK(t.rows[2].sweep_value == 4.0);
  }
  SECTION("empty value list is rejected") {
    CHECK_THROWS_AS(sweep(s, SweepAxis::snr, {}), config_error);
  }
}

TEST_CASE("frequency-count sweep flags near collisions", "[experiments]") {
  Scenario s;
  s.geometry = GeometryConfig({0, 1}, {1});
  s.thetas_deg = {88.0, 93.0, 155.0};
  s.mc = 1;
  s.seed = 5;
  const ResultTable t = sweep(s, SweepAxis::n_freqs, {6.0, 7.0});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].sweep_axis == "n_freqs");
  CHECK(t.rows[0].n_collision_pairs == 0);   // six harmonics: no pair within 0.002
  CHECK(t.rows[1].n_collision_pairs >= 1);   // seventh harmonic nearly aliases 93/155
}

TEST_CASE("CSV emission follows the fixed schema", "[experiments]") {
  SECTION("empty table emits just the header") {
    std::ostringstream os;
    emit(ResultTable{}, OutputFormat::csv, os);
    CHECK(os.str() == "scenario_id,sweep_axis,sweep_value,rmse_deg,mean_iters,mean_solve_ms,n_failed\n");
  }
  SECTION("rows carry seven comma-separated fields at six significant digits") {
    ResultTable t;
    ResultRow r;
    r.scenario_id = "demo";
    r.sweep_axis = "snr";
    r.sweep_value = -10.0;
    r.rmse_deg = 3.535533905932738;
    r.mean_iters = 1234.5;
    r.mean_solve_ms = 0.0;
    r.n_failed = 2;
    t.rows.push_back(r);
    std::ostringstream os;
    emit(t, OutputFormat::csv, os);
    const std::string out = os.str();
    CHECK(out.find("demo,snr,-10,3.53553,1234.5,0,2\n") != std::string::npos);
    CHECK(out.back() == '\n');
    // column count
    const auto line = out.substr(out.find('\n') + 1);
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
}

TEST_CASE("JSON emission round-trips through a parser", "[experiments]") {
  ResultTable t;
  ResultRow r;
  r.scenario_id = "jt";
  r.sweep_axis = "none";
  r.sweep_value = 0.0;
  r.rmse_deg = 0.25;
  r.mean_iters = 100.0;
  r.mean_solve_ms = 1.5;
  r.n_failed = 0;
  r.n_collision_pairs = 1;
  r.trial_estimates = {{88.0, 93.0}, {87.9, 93.1}};
  t.rows.push_back(r);

  std::ostringstream os;
  emit(t, OutputFormat::json, os);
  const auto j = nlohmann::json::parse(os.str());
  REQUIRE(j.contains("rows"));
  REQUIRE(j["rows"].size() == 1);
  const auto& jr = j["rows"][0];
  CHECK(jr["scenario_id"] == "jt");
  CHECK(jr["rmse_deg"] == Catch::Approx(0.25));
  CHECK(jr["n_failed"] == 0);
  CHECK(jr["n_collision_pairs"] == 1);
  CHECK(jr["sbl_rmse_deg"].is_null());  // reserved baseline sentinel
  CHECK(jr["crb_deg"].is_null());
  REQUIRE(jr["trials"].size() == 2);
  CHECK(jr["trials"][1][0] == Catch::Approx(87.9));
}

TEST_CASE("file emission writes through and rejects bad paths", "[experiments]") {
  ResultTable t;
  emit(t, OutputFormat::csv, std::string("/tmp/mfdoa_emit_test.csv"));
  std::ifstream in("/tmp/mfdoa_emit_test.csv");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "scenario_id,sweep_axis,sweep_value,rmse_deg,mean_iters,mean_solve_ms,n_failed");
  CHECK_THROWS_AS(emit(t, OutputFormat::csv, std::string("/no/such/dir/out.csv")), config_error);
}

TEST_CASE("estimator and axis names parse and print", "[experiments]") {
  CHECK(parse_estimator("fast_primal") == Estimator::fast_primal);
  CHECK(parse_estimator("full_primal") == Estimator::full_primal);
  CHECK_THROWS_AS(parse_estimator("dual"), config_error);
  CHECK(std::string(to_string(Estimator::fast_primal)) == "fast_primal");
  CHECK(parse_axis("snr") == SweepAxis::snr);
  CHECK(parse_axis("n_snapshots") == SweepAxis::n_snapshots);
  CHECK(parse_axis("n_freqs") == SweepAxis::n_freqs);
  CHECK_THROWS_AS(parse_axis("power"), config_error);
}
