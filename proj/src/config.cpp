#include "fluxepr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "fluxepr/constants.hpp"
#include "fluxepr/errors.hpp"
#include "fluxepr/geometry.hpp"

namespace fluxepr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config error at '" + path + "': " + message);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown key");
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  return obj.at(key);
}

double get_number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  return value.get<double>();
}

double require_number(const json& obj, const std::string& path, const std::string& key) {
  return get_number(require(obj, path, key), path + "." + key);
}

double optional_number(const json& obj, const std::string& path, const std::string& key,
                       double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj.at(key), path + "." + key);
}

long require_integer(const json& obj, const std::string& path, const std::string& key) {
  const json& value = require(obj, path, key);
  if (!value.is_number_integer()) fail(path + "." + key, "expected an integer");
  return value.get<long>();
}

Eigen::Vector3d get_vector3(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) fail(path, "expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = get_number(value.at(i), path);
  return v;
}

json to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

FluxQubit parse_qubit(const json& obj, json& resolved) {
  const std::string path = "qubit";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, path, {"persistent_current_a", "gap_hz", "loop_vertices_m"});
  FluxQubit qubit;
  qubit.persistent_current_a = require_number(obj, path, "persistent_current_a");
  qubit.gap_hz = require_number(obj, path, "gap_hz");
  if (obj.contains("loop_vertices_m")) {
    const json& verts = obj.at("loop_vertices_m");
    if (!verts.is_array() || verts.size() < 3)
      fail(path + ".loop_vertices_m", "expected an array of at least 3 [x,y] pairs");
    for (const auto& v : verts) {
      if (!v.is_array() || v.size() != 2)
        fail(path + ".loop_vertices_m", "vertices must be [x,y] pairs");
      qubit.loop_vertices_m.emplace_back(get_number(v.at(0), path + ".loop_vertices_m"),
                                         get_number(v.at(1), path + ".loop_vertices_m"));
    }
  } else {
    // square with the designed 47.2 um^2 loop area
    qubit.loop_vertices_m = square_loop(std::sqrt(47.2e-12));
  }
  json verts = json::array();
  for (const auto& v : qubit.loop_vertices_m) verts.push_back(json::array({v.x(), v.y()}));
  resolved = {{"persistent_current_a", qubit.persistent_current_a},
              {"gap_hz", qubit.gap_hz},
              {"loop_vertices_m", verts}};
  try {
    qubit.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return qubit;
}

ReadoutModel parse_readout(const json& obj, json& resolved) {
  const std::string path = "readout";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, path,
                      {"visibility", "linewidth_hz", "n_repetitions", "repetition_period_s",
                       "drift_floor"});
  ReadoutModel model;
  model.visibility = require_number(obj, path, "visibility");
  model.linewidth_hz = require_number(obj, path, "linewidth_hz");
  model.n_repetitions = static_cast<int>(require_integer(obj, path, "n_repetitions"));
  model.repetition_period_s = require_number(obj, path, "repetition_period_s");
  model.drift_floor = optional_number(obj, path, "drift_floor", 0.0);
  model.center_hz = 0.0;  // derived from the working point at run time
  resolved = {{"visibility", model.visibility},
              {"linewidth_hz", model.linewidth_hz},
              {"n_repetitions", model.n_repetitions},
              {"repetition_period_s", model.repetition_period_s},
              {"drift_floor", model.drift_floor}};
  try {
    model.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return model;
}

SpinEnsemble parse_spins(const json& obj, json& resolved) {
  const std::string path = "spins";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, path,
                      {"spin", "g_factor", "g_tensor", "zfs_d_hz", "strain_e_hz",
                       "orientations", "count", "flux_per_spin_wb",
                       "flux_per_moment_wb_per_jt", "position_m", "moment_sign"});
  SpinEnsemble ensemble;
  ensemble.base.spin = require_number(obj, path, "spin");
  const bool has_scalar = obj.contains("g_factor");
  const bool has_tensor = obj.contains("g_tensor");
  if (has_scalar == has_tensor)
    fail(path, "exactly one of g_factor / g_tensor is required");
  if (has_scalar) {
    ensemble.base.g_tensor =
        Eigen::Matrix3d::Identity() * require_number(obj, path, "g_factor");
  } else {
    const json& rows = obj.at("g_tensor");
    if (!rows.is_array() || rows.size() != 3) fail(path + ".g_tensor", "expected 3 rows");
    for (int i = 0; i < 3; ++i) {
      if (!rows.at(i).is_array() || rows.at(i).size() != 3)
        fail(path + ".g_tensor", "expected 3 columns per row");
      for (int j = 0; j < 3; ++j)
        ensemble.base.g_tensor(i, j) = get_number(rows.at(i).at(j), path + ".g_tensor");
    }
  }
  ensemble.base.zfs_d_hz = optional_number(obj, path, "zfs_d_hz", 0.0);
  ensemble.base.strain_e_hz = optional_number(obj, path, "strain_e_hz", 0.0);
  ensemble.count = require_number(obj, path, "count");

  json orientations_resolved = json::array();
  if (obj.contains("orientations")) {
    const json& spec = obj.at("orientations");
    if (spec.is_string()) {
      if (spec.get<std::string>() != "nv-111")
        fail(path + ".orientations", "unknown orientation preset (use \"nv-111\")");
      ensemble.orientations = nv_orientations();
    } else if (spec.is_array()) {
      ensemble.orientations.clear();
      for (const auto& item : spec) {
        if (!item.is_object()) fail(path + ".orientations", "expected objects");
        reject_unknown_keys(item, path + ".orientations", {"axis", "weight"});
        const Eigen::Vector3d axis =
            get_vector3(require(item, path + ".orientations", "axis"), path + ".orientations.axis");
        const double weight = require_number(item, path + ".orientations", "weight");
        ensemble.orientations.push_back({rotation_to_axis(axis), weight});
      }
    } else {
      fail(path + ".orientations", "expected a preset name or an array");
    }
    orientations_resolved = spec;
  } else {
    orientations_resolved = json::array({{{"axis", {0.0, 0.0, 1.0}}, {"weight", 1.0}}});
  }

  const int routes = (obj.contains("flux_per_spin_wb") ? 1 : 0) +
                     (obj.contains("flux_per_moment_wb_per_jt") ? 1 : 0) +
                     (obj.contains("position_m") ? 1 : 0);
  if (routes != 1)
    fail(path,
         "exactly one of flux_per_spin_wb / flux_per_moment_wb_per_jt / position_m is required");
  if (obj.contains("flux_per_spin_wb"))
    ensemble.flux_per_spin_wb = require_number(obj, path, "flux_per_spin_wb");
  if (obj.contains("flux_per_moment_wb_per_jt"))
    ensemble.flux_per_moment_wb_per_jt =
        require_number(obj, path, "flux_per_moment_wb_per_jt");
  if (obj.contains("position_m"))
    ensemble.position_m = get_vector3(obj.at("position_m"), path + ".position_m");

  const long sign = obj.contains("moment_sign")
                        ? require_integer(obj, path, "moment_sign")
                        : -1;
  ensemble.moment_sign = static_cast<int>(sign);

  resolved = {{"spin", ensemble.base.spin},
              {"zfs_d_hz", ensemble.base.zfs_d_hz},
              {"strain_e_hz", ensemble.base.strain_e_hz},
              {"count", ensemble.count},
              {"moment_sign", ensemble.moment_sign},
              {"orientations", orientations_resolved}};
  if (has_scalar) resolved["g_factor"] = obj.at("g_factor");
  if (has_tensor) resolved["g_tensor"] = obj.at("g_tensor");
  if (ensemble.flux_per_spin_wb) resolved["flux_per_spin_wb"] = *ensemble.flux_per_spin_wb;
  if (ensemble.flux_per_moment_wb_per_jt)
    resolved["flux_per_moment_wb_per_jt"] = *ensemble.flux_per_moment_wb_per_jt;
  if (ensemble.position_m) resolved["position_m"] = to_json(*ensemble.position_m);

  try {
    ensemble.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return ensemble;
}

FieldConfig parse_field(const json& obj, json& resolved) {
  const std::string path = "field";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, path,
                      {"b_parallel_t", "b_perpendicular_t", "parallel_direction",
                       "misalignment_deg", "misalignment_axis"});
  FieldConfig field;
  field.b_parallel_t = require_number(obj, path, "b_parallel_t");
  field.b_perpendicular_t = optional_number(obj, path, "b_perpendicular_t", 0.0);
  if (obj.contains("parallel_direction"))
    field.parallel_direction =
        get_vector3(obj.at("parallel_direction"), path + ".parallel_direction");
  field.misalignment_deg = optional_number(obj, path, "misalignment_deg", 0.0);
  if (obj.contains("misalignment_axis"))
    field.misalignment_axis =
        get_vector3(obj.at("misalignment_axis"), path + ".misalignment_axis");
  resolved = {{"b_parallel_t", field.b_parallel_t},
              {"b_perpendicular_t", field.b_perpendicular_t},
              {"parallel_direction", to_json(field.parallel_direction)},
              {"misalignment_deg", field.misalignment_deg},
              {"misalignment_axis", to_json(field.misalignment_axis)}};
  try {
    field.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return field;
}

DriveConfig parse_drive(const json& obj, json& resolved) {
  const std::string path = "drive";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, path,
                      {"f_start_hz", "f_stop_hz", "n_points", "linewidth_hz", "saturation",
                       "asymmetry_tail_hz"});
  DriveConfig drive;
  drive.f_start_hz = require_number(obj, path, "f_start_hz");
  drive.f_stop_hz = require_number(obj, path, "f_stop_hz");
  drive.n_points = static_cast<int>(require_integer(obj, path, "n_points"));
  drive.linewidth_hz = require_number(obj, path, "linewidth_hz");
  drive.saturation = require_number(obj, path, "saturation");
  drive.asymmetry_tail_hz = optional_number(obj, path, "asymmetry_tail_hz", 0.0);
  resolved = {{"f_start_hz", drive.f_start_hz},
              {"f_stop_hz", drive.f_stop_hz},
              {"n_points", drive.n_points},
              {"linewidth_hz", drive.linewidth_hz},
              {"saturation", drive.saturation},
              {"asymmetry_tail_hz", drive.asymmetry_tail_hz}};
  return drive;
}

RelaxationRates parse_relaxation(const json& obj, json& resolved) {
  const std::string path = "relaxation";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, path, {"gamma_10_per_s", "gamma_20_per_s", "gamma_21_per_s"});
  RelaxationRates rates;
  rates.gamma_10_per_s = require_number(obj, path, "gamma_10_per_s");
  rates.gamma_20_per_s = require_number(obj, path, "gamma_20_per_s");
  rates.gamma_21_per_s = require_number(obj, path, "gamma_21_per_s");
  resolved = {{"gamma_10_per_s", rates.gamma_10_per_s},
              {"gamma_20_per_s", rates.gamma_20_per_s},
              {"gamma_21_per_s", rates.gamma_21_per_s}};
  return rates;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& document) {
  if (!document.is_object()) throw ConfigError("config error at '': expected a JSON object");
  reject_unknown_keys(document, "",
                      {"qubit", "readout", "spins", "field", "drive", "relaxation", "sweep",
                       "seed", "notes"});

  RunConfig rc;
  json resolved;
  rc.experiment.qubit = parse_qubit(require(document, "", "qubit"), resolved["qubit"]);
  rc.experiment.readout = parse_readout(require(document, "", "readout"), resolved["readout"]);
  rc.experiment.spins = parse_spins(require(document, "", "spins"), resolved["spins"]);
  rc.experiment.field = parse_field(require(document, "", "field"), resolved["field"]);
  rc.experiment.drive = parse_drive(require(document, "", "drive"), resolved["drive"]);
  rc.experiment.relaxation =
      parse_relaxation(require(document, "", "relaxation"), resolved["relaxation"]);

  const json& sweep = require(document, "", "sweep");
  if (!sweep.is_object()) fail("sweep", "expected an object");
  reject_unknown_keys(sweep, "sweep",
                      {"temperature_k", "working_flux_offset_wb", "probe_detuning_sign",
                       "dynamic_range_hz", "shot_noise"});
  rc.experiment.temperature_k = require_number(sweep, "sweep", "temperature_k");
  rc.experiment.working_flux_offset_wb =
      require_number(sweep, "sweep", "working_flux_offset_wb");
  rc.experiment.probe_detuning_sign =
      optional_number(sweep, "sweep", "probe_detuning_sign", 1.0);
  if (std::abs(rc.experiment.probe_detuning_sign) != 1.0)
    fail("sweep.probe_detuning_sign", "must be +1 or -1");
  rc.experiment.dynamic_range_hz = optional_number(
      sweep, "sweep", "dynamic_range_hz", std::numeric_limits<double>::infinity());
  if (sweep.contains("shot_noise")) {
    if (!sweep.at("shot_noise").is_boolean()) fail("sweep.shot_noise", "expected a boolean");
    rc.experiment.shot_noise = sweep.at("shot_noise").get<bool>();
  }
  resolved["sweep"] = {{"temperature_k", rc.experiment.temperature_k},
                       {"working_flux_offset_wb", rc.experiment.working_flux_offset_wb},
                       {"probe_detuning_sign", rc.experiment.probe_detuning_sign},
                       {"shot_noise", rc.experiment.shot_noise}};
  if (std::isfinite(rc.experiment.dynamic_range_hz))
    resolved["sweep"]["dynamic_range_hz"] = rc.experiment.dynamic_range_hz;

  const json& seed = require(document, "", "seed");
  if (!seed.is_number_integer() || seed.get<long long>() < 0)
    fail("seed", "expected a non-negative integer");
  rc.experiment.seed = seed.get<uint64_t>();
  resolved["seed"] = rc.experiment.seed;
  if (document.contains("notes")) resolved["notes"] = document.at("notes");

  try {
    rc.experiment.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }

  rc.resolved = std::move(resolved);
  rc.hash_hex = fnv1a64_hex(rc.resolved.dump());
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " + e.what());
  }
  return parse_run_config(document);
}

std::string fnv1a64_hex(const std::string& bytes) {
  uint64_t hash = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace fluxepr
