#include "sesans/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sesans/constants.hpp"
#include "sesans/errors.hpp"

namespace sesans {

namespace {

using nlohmann::json;

GratingSpec measured_grating() {
  // 2 um period silicon grating: 560 nm channels, 10 um deep walls.
  GratingSpec g;
  g.a_nm = 720.0;
  g.b_nm = 1280.0;
  g.depth_nm = 1.0e4;
  g.sld_per_nm2 = 2.06e-4;
  g.n_periods = 512;
  return g;
}

InstrumentConfig instrument_2mhz() {
  InstrumentConfig inst;
  inst.xi0_nm_per_nm2 = 2.05e4;
  inst.rf_frequency_hz = 2.0e6;
  inst.field_angle_rad = kPi / 4.0;
  inst.lambda_min_nm = 0.3;
  inst.lambda_max_nm = 1.3;
  inst.tof_bin_nm = 0.0025;
  return inst;
}

InstrumentConfig instrument_3mhz() {
  InstrumentConfig inst = instrument_2mhz();
  inst.rf_frequency_hz = 3.0e6;
  inst.xi0_nm_per_nm2 = 3.075e4;  // xi0 scales with the rf frequency
  return inst;
}

ResolutionParams measured_resolution() {
  ResolutionParams r;
  r.delta_theta_rad = 0.75e-3;
  r.delta_J_nm = 10.0;
  r.delta_b_nm = 1.0e-3;
  r.a_lambda_nm = 3.33e-4;
  r.b_lambda = 1.01e-4;
  return r;
}

BeamProfile default_beam() {
  // 49 grating periods: the 16 stratified impact samples then cover the
  // grating phase uniformly, which the oracle's period average relies on.
  return BeamProfile{98000.0, 16};
}

std::vector<double> order_positions(const SweepSpec& sweep, double period) {
  std::vector<double> xs;
  for (int n = 1; n * period <= sweep.xi_max_nm; ++n)
    if (n * period >= sweep.xi_min_nm) xs.push_back(n * period);
  return xs;
}

}  // namespace

std::optional<PresetId> parse_preset(const std::string& name) {
  if (name == "fig2a_ideal") return PresetId::fig2a_ideal;
  if (name == "fig2b_damped") return PresetId::fig2b_damped;
  if (name == "fig3a_2MHz") return PresetId::fig3a_2MHz;
  if (name == "fig3b_3MHz") return PresetId::fig3b_3MHz;
  if (name == "fig4_tilted_8deg") return PresetId::fig4_tilted_8deg;
  if (name == "fig4_tilted_5deg") return PresetId::fig4_tilted_5deg;
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  return {"fig2a_ideal", "fig2b_damped",     "fig3a_2MHz",
          "fig3b_3MHz",  "fig4_tilted_8deg", "fig4_tilted_5deg"};
}

RunConfig preset(PresetId id) {
  RunConfig cfg;
  cfg.grating = measured_grating();
  cfg.instrument = instrument_2mhz();
  cfg.resolution = measured_resolution();
  cfg.packet = WavePacketSpec::plane_wave();
  cfg.beam = default_beam();
  cfg.sweep = {1900.0, 25100.0, 11601};  // 2 nm steps landing on every echo order
  switch (id) {
    case PresetId::fig2a_ideal:
      cfg.outputs = {"ideal_tof", "background"};
      cfg.provenance =
          "preset fig2a_ideal: plane-wave TOF pattern; 2 MHz rf, xi0=2.05e4 nm/nm^2, "
          "Si grating p=2um channel=560nm depth=10um, band 0.3-1.3 nm";
      break;
    case PresetId::fig2b_damped:
      cfg.packet = WavePacketSpec::gaussian(60000.0);
      cfg.outputs = {"ideal_tof", "damped_semiclassical", "background"};
      cfg.provenance =
          "preset fig2b_damped: single-path model with 60 um packet width; 2 MHz rf, "
          "xi0=2.05e4 nm/nm^2, Si grating p=2um channel=560nm depth=10um";
      break;
    case PresetId::fig3a_2MHz:
      cfg.outputs = {"ideal_tof", "background", "resolution_envelope", "smeared"};
      cfg.provenance =
          "preset fig3a_2MHz: 2 MHz rf, xi0=2.05e4 nm/nm^2, measured resolution "
          "(dtheta=0.75mrad, dJ=10nm, db=1e-3nm, a_l=3.33e-4nm, b_l=1.01e-4)";
      break;
    case PresetId::fig3b_3MHz:
      cfg.instrument = instrument_3mhz();
      cfg.sweep = {2800.0, 25200.0, 11201};
      cfg.outputs = {"ideal_tof", "background", "resolution_envelope", "smeared"};
      cfg.provenance =
          "preset fig3b_3MHz: 3 MHz rf, xi0=3.075e4 nm/nm^2, measured resolution "
          "(dtheta=0.75mrad, dJ=10nm, db=1e-3nm, a_l=3.33e-4nm, b_l=1.01e-4)";
      break;
    case PresetId::fig4_tilted_8deg:
      cfg.tilt_rad = 8.0 * kPi / 180.0;
      cfg.sweep = {7200.0, 21600.0, 7201};
      cfg.outputs = {"ideal_tof", "background", "smeared"};
      cfg.provenance =
          "preset fig4_tilted_8deg: grating channels inclined 8 deg to the encoding "
          "direction (effective period 2000/sin8deg ~ 14.37 um); 2 MHz rf";
      break;
    case PresetId::fig4_tilted_5deg:
      cfg.instrument = instrument_3mhz();
      cfg.tilt_rad = 5.0 * kPi / 180.0;
      cfg.sweep = {11474.0, 34424.0, 11476};
      cfg.outputs = {"ideal_tof", "background", "smeared"};
      cfg.provenance =
          "preset fig4_tilted_5deg: grating channels inclined 5 deg to the encoding "
          "direction (effective period 2000/sin5deg ~ 22.95 um); 3 MHz rf";
      break;
  }
  cfg.oracle_xi_nm = order_positions(cfg.sweep, cfg.grating.period_nm());
  return cfg;
}

std::vector<std::string> check_config(const RunConfig& cfg) {
  std::vector<std::string> v = check_grating(cfg.grating);
  auto append = [&v](std::vector<std::string> more) {
    v.insert(v.end(), more.begin(), more.end());
  };
  append(check_instrument(cfg.instrument));
  append(check_resolution(cfg.resolution));
  append(check_packet(cfg.packet));
  append(check_beam(cfg.beam));
  append(check_grid(cfg.oracle_grid));
  if (cfg.sweep.n_points < 2) v.push_back("sweep: n_points must be >= 2");
  if (!(cfg.sweep.xi_min_nm < cfg.sweep.xi_max_nm))
    v.push_back("sweep: xi_min_nm must be below xi_max_nm");
  if (cfg.tilt_rad && !(*cfg.tilt_rad > 0.0 && *cfg.tilt_rad <= kPi / 2.0))
    v.push_back("tilt_rad must lie in (0, pi/2]");
  for (const auto& o : cfg.outputs) {
    const auto& known = known_outputs();
    if (std::find(known.begin(), known.end(), o) == known.end())
      v.push_back("outputs: unknown curve '" + o + "'");
  }
  if (cfg.outputs.empty()) v.push_back("outputs: at least one curve must be requested");
  return v;
}

void validate_config(const RunConfig& cfg) {
  auto v = check_config(cfg);
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid configuration (" << v.size() << " violation" << (v.size() > 1 ? "s" : "")
     << "): ";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i];
  throw Error(ErrorCategory::validation, os.str());
}

namespace {

void line_col_from_offset(const std::string& text, size_t byte, size_t& line, size_t& col) {
  line = 1;
  col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (j.contains(key)) return j.at(key).get<T>();
  return fallback;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::config, "cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 0, col = 0;
    line_col_from_offset(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
    std::ostringstream os;
    os << path << ": parse error at line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorCategory::config, os.str());
  }

  RunConfig cfg;
  try {
    const json& g = j.at("grating");
    cfg.grating.a_nm = g.at("a_nm").get<double>();
    cfg.grating.b_nm = g.at("b_nm").get<double>();
    cfg.grating.depth_nm = g.at("depth_nm").get<double>();
    cfg.grating.sld_per_nm2 = g.at("sld_per_nm2").get<double>();
    cfg.grating.n_periods = get_or<int>(g, "n_periods", 512);

    const json& inst = j.at("instrument");
    cfg.instrument.xi0_nm_per_nm2 = inst.at("xi0_nm_per_nm2").get<double>();
    cfg.instrument.rf_frequency_hz = get_or<double>(inst, "rf_frequency_hz", 2.0e6);
    if (inst.contains("arm_length_m") && !inst.at("arm_length_m").is_null())
      cfg.instrument.arm_length_m = inst.at("arm_length_m").get<double>();
    cfg.instrument.field_angle_rad = get_or<double>(inst, "field_angle_rad", kPi / 4.0);
    const auto band = inst.at("lambda_band_nm");
    cfg.instrument.lambda_min_nm = band.at(0).get<double>();
    cfg.instrument.lambda_max_nm = band.at(1).get<double>();
    cfg.instrument.tof_bin_nm = get_or<double>(inst, "tof_bin_nm", 0.0025);

    if (j.contains("resolution")) {
      const json& r = j.at("resolution");
      cfg.resolution.delta_theta_rad = get_or<double>(r, "delta_theta_rad", 0.0);
      cfg.resolution.delta_J_nm = get_or<double>(r, "delta_J_nm", 0.0);
      cfg.resolution.delta_b_nm = get_or<double>(r, "delta_b_nm", 0.0);
      cfg.resolution.a_lambda_nm = get_or<double>(r, "a_lambda_nm", 0.0);
      cfg.resolution.b_lambda = get_or<double>(r, "b_lambda", 0.0);
    }

    cfg.packet = WavePacketSpec::plane_wave();
    if (j.contains("packet")) {
      const json& pk = j.at("packet");
      if (pk.contains("delta_nm")) {
        const auto& d = pk.at("delta_nm");
        if (d.is_string()) {
          if (d.get<std::string>() != "infinite")
            throw Error(ErrorCategory::config,
                        "packet.delta_nm: only the string \"infinite\" is recognized");
        } else {
          cfg.packet.delta_nm = d.get<double>();
        }
      }
      if (pk.contains("k0_nm_inv")) {
        const auto& k0 = pk.at("k0_nm_inv");
        for (int i = 0; i < 3; ++i) cfg.packet.k0_nm_inv[static_cast<size_t>(i)] =
            k0.at(i).get<double>();
      }
    }

    cfg.beam = default_beam();
    if (j.contains("beam")) {
      const json& bm = j.at("beam");
      cfg.beam.width_nm = get_or<double>(bm, "width_nm", cfg.beam.width_nm);
      cfg.beam.n_impact_samples =
          get_or<int>(bm, "n_impact_samples", cfg.beam.n_impact_samples);
    }

    const json& sw = j.at("sweep");
    cfg.sweep.xi_min_nm = sw.at("xi_min_nm").get<double>();
    cfg.sweep.xi_max_nm = sw.at("xi_max_nm").get<double>();
    cfg.sweep.n_points = sw.at("n_points").get<long>();

    if (j.contains("tilt_rad") && !j.at("tilt_rad").is_null())
      cfg.tilt_rad = j.at("tilt_rad").get<double>();

    cfg.outputs = get_or<std::vector<std::string>>(j, "outputs", {"ideal_tof"});

    if (j.contains("oracle_grid")) {
      const json& og = j.at("oracle_grid");
      cfg.oracle_grid.n_k = get_or<int>(og, "n_k", cfg.oracle_grid.n_k);
      cfg.oracle_grid.n_sigma = get_or<double>(og, "n_sigma", cfg.oracle_grid.n_sigma);
      cfg.oracle_grid.dy_target_nm =
          get_or<double>(og, "dy_target_nm", cfg.oracle_grid.dy_target_nm);
      cfg.oracle_grid.tolerance = get_or<double>(og, "tolerance", cfg.oracle_grid.tolerance);
      cfg.oracle_grid.grid_scale =
          get_or<double>(og, "grid_scale", cfg.oracle_grid.grid_scale);
    }

    cfg.oracle_xi_nm = get_or<std::vector<double>>(j, "oracle_xi_nm", {});
    if (cfg.oracle_xi_nm.empty())
      cfg.oracle_xi_nm = order_positions(cfg.sweep, cfg.grating.period_nm());

    cfg.provenance = get_or<std::string>(j, "provenance", "config " + path);
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::config, path + ": " + e.what());
  }

  validate_config(cfg);
  return cfg;
}

}  // namespace sesans
