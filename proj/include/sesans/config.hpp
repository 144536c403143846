#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sesans/grating.hpp"
#include "sesans/instrument.hpp"
#include "sesans/models.hpp"
#include "sesans/oracle.hpp"

namespace sesans {

/// Spin echo length grid definition.
struct SweepSpec {
  double xi_min_nm = 0.0;
  double xi_max_nm = 0.0;
  long n_points = 0;
};

/// Complete description of one simulation run.
struct RunConfig {
  GratingSpec grating;
  InstrumentConfig instrument;
  ResolutionParams resolution;
  WavePacketSpec packet;
  BeamProfile beam;
  SweepSpec sweep;
  std::optional<double> tilt_rad;
  std::vector<std::string> outputs;
  QuadratureGrid oracle_grid;
  std::vector<double> oracle_xi_nm;  // explicit oracle sample points (expensive curves)
  std::string provenance;            // echoed in output headers
};

inline const std::vector<std::string>& known_outputs() {
  static const std::vector<std::string> k = {
      "ideal_tof",        "damped_semiclassical", "smeared",
      "background",       "resolution_envelope",  "oracle_quantum",
      "oracle_semiclassical"};
  return k;
}

enum class PresetId {
  fig2a_ideal,
  fig2b_damped,
  fig3a_2MHz,
  fig3b_3MHz,
  fig4_tilted_8deg,
  fig4_tilted_5deg,
};

std::optional<PresetId> parse_preset(const std::string& name);
std::vector<std::string> preset_names();
RunConfig preset(PresetId id);

/// Returns every violated invariant across all components (empty when valid).
std::vector<std::string> check_config(const RunConfig& cfg);
/// Throws Error(validation) with all violations listed together.
void validate_config(const RunConfig& cfg);

/// Loads and validates a JSON run configuration; parse failures carry
/// line/column, validation failures list every violated invariant.
RunConfig load_config(const std::string& path);

}  // namespace sesans
