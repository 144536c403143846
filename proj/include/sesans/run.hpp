#pragma once

#include <string>
#include <vector>

#include "sesans/config.hpp"
#include "sesans/instrument.hpp"
#include "sesans/pattern.hpp"

namespace sesans {

struct NamedCurve {
  std::string name;
  EchoPattern pattern;
};

struct NamedPeaks {
  std::string name;  // "<curve>_peaks"
  std::vector<PeakEstimate> peaks;
};

struct RunResult {
  std::vector<NamedCurve> curves;
  std::vector<NamedPeaks> peak_tables;
  std::vector<std::string> warnings;
  std::string provenance;
  double effective_period_nm = 0.0;
};

/// Computes every requested curve deterministically; peak tables accompany
/// curves that span at least one (effective) grating period.
RunResult run(const RunConfig& cfg);

/// Writes one CSV per curve (xi_nm,lambda_nm,polarization) and per peak table
/// (order,xi_peak_nm,height,width_nm) into `dir`. 12 significant digits;
/// re-running the same config reproduces files byte for byte.
std::vector<std::string> export_csv(const RunResult& result, const RunConfig& cfg,
                                    const std::string& dir);

/// Single-path residual damping G = exp(-xi^2/(2 Delta^2)) for a packet whose
/// damping-equivalent Gaussian has the given FWHM; the model-discrimination
/// number printed by `report`.
double report_discrimination(double fwhm_nm, double xi_nm);

}  // namespace sesans
