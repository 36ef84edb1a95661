#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "cumbound/harness.hpp"

using namespace cumbound;

namespace {

const std::string kConfigDir = CUMBOUND_CONFIG_DIR;

std::string csv_of(const ExperimentResult& result) {
  std::ostringstream out;
  write_csv(out, result.rows);
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto config = parse_config(R"({
    "experiment": "t", "seed": 5, "orders": [6, 3, 3, 4],
    "exact": [{"model": "LaguerreLogDet", "n": [100, 400], "p": "sqrt", "regime": "SmallP"},
              {"model": "LaguerreLogDet", "n": 100, "p": {"ratio": 0.25}},
              {"model": "LaguerreLogDet", "n": 100, "p": {"n_minus": 3}},
              {"model": "CBE", "n": 8, "beta": [1, 4]}],
    "simulate": [{"kind": "GnmSubgraph", "n": 10, "density": 0.5, "pattern": "P2", "replicates": 50}]
  })");
  CHECK(config.id == "t");
  CHECK(config.seed == 5);
  CHECK(config.orders == std::vector<int>{3, 4, 6});
  REQUIRE(config.exact.size() == 6);
  CHECK(config.exact[0].model.p == 10);
  CHECK(config.exact[1].model.p == 20);
  CHECK(config.exact[2].model.p == 25);
  CHECK(config.exact[3].model.p == 97);
  CHECK(config.exact[4].model.beta == 1.0);
  CHECK(config.exact[5].model.beta == 4.0);
  CHECK(config.exact[0].regime->tag == RegimeTag::SmallP);
  CHECK_FALSE(config.exact[3].regime.has_value());
  REQUIRE(config.simulate.size() == 1);
  CHECK(config.simulate[0].spec.m == 23);
  CHECK(config.simulate[0].spec.pattern == PatternGraph::path2());
  CHECK(config.format == ReportFormat::CSV);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(load_config(kConfigDir + "/../tests/data/unknown_key.json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [3]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [2], "exact": [{"model": "CBE", "n": 5}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [13], "exact": [{"model": "CBE", "n": 5}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"orders": [3], "exact": [{"model": "CBE", "n": 5}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [3], "exact": [{"model": "CBE", "n": []}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [3], "exact": [{"model": "CBE", "n": 5, "beta": 3}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [3], "exact": [{"model": "Wigner", "n": 5}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [3], "exact": [{"model": "LaguerreLogDet", "n": 5, "p": 6}]})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"seed": 1, "orders": [3], "simulate": [{"kind": "GnpSubgraph", "n": 5, "p": 1.5}]})"),
      ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [3], "simulate": [{"kind": "Crossings", "n": 1}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "orders": [3], "exact": [{"model": "CBE", "n": 5}],
                                   "output": {"format": "xml"}})"),
                  ConfigError);
}

TEST_CASE("CSV layout") {
  ReportRow row;
  row.model = "CBE";
  row.n = 10;
  row.beta = 2.0;
  row.k = 4;
  row.gap = 0.125;
  row.bound = 0.5;
  row.delta = 1.5;
  std::ostringstream out;
  write_csv(out, {row});
  CHECK(out.str() ==
        "model,n,p,beta,k,gap,se,bound,delta,satisfied\n"
        "CBE,10,,2,4,0.125,,0.5,1.5,true\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(1.0 / 3) == "0.33333333333333331");
}

TEST_CASE("JSON round trip") {
  auto config = load_config(kConfigDir + "/report_default.json");
  const auto result = run_experiment(config);
  CHECK(result.errors.empty());
  std::ostringstream out;
  write_json(out, config, result);
  const auto rows = rows_from_json(out.str());
  REQUIRE(rows.size() == result.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == result.rows[i]);
}

TEST_CASE("report rows and fits") {
  const auto config = load_config(kConfigDir + "/report_default.json");
  const auto result = run_experiment(config);
  // 3 CBE + 3 Laguerre + 2 Jacobi exact, 3 + 3 + 1 + 3 simulated; 3 orders each
  CHECK(result.rows.size() == 18 * 3);
  CHECK(result.soundness_violations() == 0);
  for (const auto& row : result.rows) {
    CHECK(row.gap >= 0.0);
    if (row.exact) CHECK_FALSE(row.se.has_value());
    else CHECK(row.se.has_value());
    if (row.model.rfind("JacobiLogDet", 0) == 0) CHECK_FALSE(row.bound.has_value());
  }
  bool cbe_fit = false;
  for (const auto& f : result.fits)
    if (f.model == "CBE" && f.k == 4) {
      REQUIRE(f.fit.has_value());
      CHECK(f.x_name == "delta");
      CHECK(f.fit->slope < 0.0);
      cbe_fit = true;
    }
  CHECK(cbe_fit);
}

TEST_CASE("reports do not depend on thread count") {
  const auto config = load_config(kConfigDir + "/report_default.json");
  const auto one = csv_of(run_experiment(config, {1, true, true}));
  const auto four = csv_of(run_experiment(config, {4, true, true}));
  CHECK(one == four);
  CHECK(one == csv_of(run_experiment(config, {3, true, true})));
  auto reseeded = config;
  reseed(reseeded, 8);
  CHECK(csv_of(run_experiment(reseeded)) != one);
}

TEST_CASE("shipped default grids are sound") {
  for (const char* name : {"exact_default.json", "report_default.json"}) {
    const auto config = load_config(kConfigDir + "/" + name);
    const auto result = run_experiment(config, {2, true, false});
    CHECK(result.errors.empty());
    CHECK(!result.rows.empty());
    CHECK(result.soundness_violations() == 0);
  }
}

TEST_CASE("even-order exact gaps shrink along each grid") {
  const auto config = load_config(kConfigDir + "/exact_default.json");
  const auto result = run_experiment(config, {2, true, false});
  std::map<std::tuple<int, std::string, double, int>, std::vector<const ReportRow*>> series;
  for (const auto& row : result.rows)
    if (row.k % 2 == 0) series[{row.group, row.model, row.beta.value_or(0.0), row.k}].push_back(&row);
  CHECK(!series.empty());
  for (auto& [key, rows] : series)
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i]->n > rows[i - 1]->n);
      CHECK_MESSAGE(rows[i]->gap <= rows[i - 1]->gap, std::get<1>(key), " k=", std::get<3>(key), " n=", rows[i]->n);
    }
}

TEST_CASE("emitted files") {
  const auto config = load_config(kConfigDir + "/report_default.json");
  const auto result = run_experiment(config);
  const auto dir = std::filesystem::temp_directory_path() / "cumbound_harness_test";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "r.csv").string();
  emit_report(config, result, ReportFormat::CSV, csv);
  CHECK(std::filesystem::exists(csv));
  CHECK(std::filesystem::exists(csv + ".fits.csv"));
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "model,n,p,beta,k,gap,se,bound,delta,satisfied");
  CHECK_THROWS(emit_report(config, result, ReportFormat::JSON, (dir / "missing" / "r.json").string()));
  std::filesystem::remove_all(dir);
}
