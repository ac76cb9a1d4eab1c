#include "toric/criticalpoints.hpp"
#include "toric/errors.hpp"
#include "toric/io.hpp"
#include "toric/kstability.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace toric;

namespace {

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("polytope JSON round trip") {
  const Polytope2 d = delta_p(0.25);
  const Polytope2 back = parse_polytope_json(polytope_json(d));
  REQUIRE(back.size() == d.size());
  for (int i = 0; i < d.size(); ++i) CHECK((back.vertex(i) - d.vertex(i)).norm() == 0.0);
  const Polytope2 s = parse_polytope_json(R"({"vertices": [[0, 0], [1, 0], [0, 1]]})");
  CHECK(s.lattice_perimeter() == doctest::Approx(3.0));
}

TEST_CASE("malformed polytope JSON") {
  CHECK_THROWS_AS(parse_polytope_json("{"), ValidationError);
  CHECK_THROWS_AS(parse_polytope_json(R"({"points": []})"), ValidationError);
  CHECK_THROWS_AS(parse_polytope_json(R"({"vertices": [[0, 0], [1, "a"], [0, 1]]})"), ValidationError);
  CHECK_THROWS_AS(parse_polytope_json(R"({"vertices": [[0, 0], [1, 0, 2], [0, 1]]})"), ValidationError);
  CHECK_THROWS_AS(parse_polytope_json(R"({"vertices": [[0, 0], [1, 0], [0, 2], [1, 1]]})"), ValidationError);
  CHECK_THROWS_AS(read_polytope_json(temp_path("definitely_missing_polytope.json")), IoError);
}

TEST_CASE("scan CSV round trip") {
  const DFEvaluator eval(FunctionalContext::make(delta_p(0.3), {0.1, -0.2, 1.0}, 4.0));
  ScanOptions o;
  o.grid = 4;
  const auto tables = df_scan_all(eval, o);
  const std::string path = temp_path("toric_io_scan.csv");
  emit_scan_csv(tables, path);
  const auto rows = read_scan_csv(path);
  CHECK(rows.size() == 6 * 16);
  const auto minima = csv_minima(rows);
  REQUIRE(minima.size() == tables.size());
  for (const ScanTable& t : tables) {
    const ScanMinimum& m = minima.at(t.case_id());
    CHECK(m.value == doctest::Approx(t.minimum.value).epsilon(1e-11));
    CHECK(m.e == doctest::Approx(t.minimum.e).epsilon(1e-11));
    CHECK(m.f == doctest::Approx(t.minimum.f).epsilon(1e-11));
    CHECK(m.orientation == t.minimum.orientation);
  }
  std::filesystem::remove(path);
}

TEST_CASE("empty table list gives a header-only CSV") {
  const std::string path = temp_path("toric_io_empty.csv");
  emit_scan_csv({}, path);
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all == "case,e,f,df_pos,df_neg,valid\n");
  CHECK(read_scan_csv(path).empty());
  std::filesystem::remove(path);
}

TEST_CASE("I/O failures") {
  CHECK_THROWS_AS(emit_scan_csv({}, "/nonexistent-dir/x.csv"), IoError);
  CHECK_THROWS_AS(write_text("/nonexistent-dir/x.json", "{}"), IoError);
  CHECK_THROWS_AS(read_scan_csv(temp_path("definitely_missing_scan.csv")), IoError);
}

TEST_CASE("report JSON fields") {
  const DFEvaluator eval(FunctionalContext::make(delta_p(0.3), {0.1, -0.2, 1.0}, 4.0));
  VerdictOptions o;
  o.scan.grid = 3;
  const StabilityReport r = stability_verdict(eval, o);
  const auto doc = nlohmann::json::parse(report_json(eval.context().polytope, eval.context().f, 4.0, r));
  for (const char* key : {"polytope", "f", "n", "verdict", "minimum", "cases"}) CHECK(doc.contains(key));
  CHECK(doc["cases"].size() == 6);
  CHECK(doc["f"][2].get<double>() == 1.0);

  const auto rays = critical_rays_json(unit_square(), 4.0, {analyse_ray(unit_square(), 4.0, {0, 0, 1})});
  CHECK(nlohmann::json::parse(rays).contains("rays"));
}
