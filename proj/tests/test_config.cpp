#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fluxepr/config.hpp"
#include "fluxepr/csv.hpp"
#include "fluxepr/errors.hpp"

using namespace fluxepr;
using nlohmann::json;

namespace {

json valid_document() {
  return json::parse(R"({
    "qubit": {"persistent_current_a": 3e-7, "gap_hz": 5e9},
    "readout": {"visibility": 0.6, "linewidth_hz": 2e7, "n_repetitions": 1000,
                "repetition_period_s": 2e-4, "drift_floor": 0.0},
    "spins": {"spin": 1.0, "g_factor": 2.05, "zfs_d_hz": 2.883e9, "strain_e_hz": 5e6,
              "orientations": "nv-111", "count": 1e4, "flux_per_spin_wb": 3.3e-24},
    "field": {"b_parallel_t": 5.8e-3, "parallel_direction": [1, 0, 0],
              "misalignment_deg": 0.0},
    "drive": {"f_start_hz": 2.6e9, "f_stop_hz": 3.2e9, "n_points": 301,
              "linewidth_hz": 3e6, "saturation": 30.0},
    "relaxation": {"gamma_10_per_s": 1.0, "gamma_20_per_s": 0.2, "gamma_21_per_s": 3.0},
    "sweep": {"temperature_k": 0.02, "working_flux_offset_wb": 6.2035e-18},
    "seed": 42
  })");
}

}  // namespace

TEST_CASE("a valid document parses into a runnable experiment") {
  const RunConfig rc = parse_run_config(valid_document());
  CHECK(rc.experiment.qubit.gap_hz == 5e9);
  CHECK(rc.experiment.spins.orientations.size() == 4);
  CHECK(rc.experiment.spins.flux_per_spin_wb.has_value());
  CHECK(rc.experiment.seed == 42);
  CHECK(rc.experiment.shot_noise);  // default
  CHECK(rc.hash_hex.size() == 16);
  // the default loop carries the designed area
  CHECK(rc.experiment.qubit.loop_area_m2() == doctest::Approx(47.2e-12).epsilon(1e-9));
}

TEST_CASE("the hash is stable and tracks content") {
  const RunConfig a = parse_run_config(valid_document());
  const RunConfig b = parse_run_config(valid_document());
  CHECK(a.hash_hex == b.hash_hex);
  json changed = valid_document();
  changed["seed"] = 43;
  CHECK(parse_run_config(changed).hash_hex != a.hash_hex);
}

TEST_CASE("unknown keys are rejected, naming the offender") {
  json doc = valid_document();
  doc["spins"]["gfactor_typo"] = 2.0;
  try {
    parse_run_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gfactor_typo") != std::string::npos);
  }
}

TEST_CASE("missing and malformed keys are rejected") {
  json doc = valid_document();
  doc.erase("seed");
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

  doc = valid_document();
  doc["readout"].erase("visibility");
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

  doc = valid_document();
  doc["drive"]["n_points"] = 2.5;  // not an integer
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

  doc = valid_document();
  doc["spins"]["g_tensor"] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};  // plus g_factor
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

  doc = valid_document();
  doc["spins"].erase("flux_per_spin_wb");
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

  doc = valid_document();
  doc["field"]["parallel_direction"] = {1, 1};  // not 3 components
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

  doc = valid_document();
  doc["readout"]["visibility"] = 1.4;  // violates the model invariant
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("physics invariants are enforced through the schema") {
  json doc = valid_document();
  doc["spins"]["spin"] = 0.75;
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

  doc = valid_document();
  doc["qubit"]["persistent_current_a"] = -1e-7;
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("CSV writer/reader round trip with comments and notes") {
  CsvTable table;
  table.comments = {"fluxepr 0.1.0", "config-hash fnv1a64=deadbeefdeadbeef"};
  table.columns = {"n_rep", "sigma"};
  table.rows = {{100.0, 0.05}, {5000.0, 0.0071}};
  table.row_notes = {"", "1s"};

  const std::string path = "/tmp/fluxepr_test_roundtrip.csv";
  write_csv_file(path, table, "note");

  const CsvTable read = read_csv_file(path);
  REQUIRE(read.columns.size() == 3);
  CHECK(read.columns[2] == "note");
  CHECK(read.column_index("sigma") == 1);
  CHECK_THROWS_AS(read.column_index("missing_column"), DataError);
  REQUIRE(read.rows.size() == 2);
  CHECK(read.rows[0][0] == 100.0);
  CHECK(read.rows[1][1] == doctest::Approx(0.0071));
  CHECK(read.row_notes[1] == "1s");
  CHECK(read.comments.size() == 2);
  std::remove(path.c_str());
}

TEST_CASE("CSV reader flags non-numeric interior cells") {
  const std::string path = "/tmp/fluxepr_test_bad.csv";
  {
    std::ofstream out(path);
    out << "a,b\n1,2\nxx,3\n";
  }
  CHECK_THROWS_AS(read_csv_file(path), DataError);
  std::remove(path.c_str());
}

TEST_CASE("FNV-1a 64 matches the published test vectors") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}
