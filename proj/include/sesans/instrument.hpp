#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sesans/pattern.hpp"

namespace sesans {

/// Spin-echo instrument settings. xi0 relates wavelength to spin echo length
/// through xi = xi0 lambda^2 and is a direct input; the arm length is optional
/// because xi0 is normally obtained by fitting echo peak positions.
struct InstrumentConfig {
  double xi0_nm_per_nm2 = 0.0;
  double rf_frequency_hz = 0.0;
  std::optional<double> arm_length_m;
  double field_angle_rad = 0.0;  // theta0
  double lambda_min_nm = 0.0;
  double lambda_max_nm = 0.0;
  double tof_bin_nm = 0.0;
};

std::vector<std::string> check_instrument(const InstrumentConfig& inst);

/// The four uncertainty sources entering the spin-echo-length resolution.
struct ResolutionParams {
  double delta_theta_rad = 0.0;  // beam divergence (standard deviation)
  double delta_J_nm = 0.0;       // grating channel misplacement
  double delta_b_nm = 0.0;       // TOF bin width, as a wavelength sigma
  double a_lambda_nm = 0.0;      // wavelength spread, constant term
  double b_lambda = 0.0;         // wavelength spread, linear-in-lambda term

  bool all_zero() const {
    return delta_theta_rad == 0.0 && delta_J_nm == 0.0 && delta_b_nm == 0.0 &&
           a_lambda_nm == 0.0 && b_lambda == 0.0;
  }
  ResolutionParams scaled(double s) const {
    return {s * delta_theta_rad, s * delta_J_nm, s * delta_b_nm, s * a_lambda_nm,
            s * b_lambda};
  }
};

std::vector<std::string> check_resolution(const ResolutionParams& res);

/// One measured echo peak.
struct PeakEstimate {
  int order = 0;
  double xi_peak_nm = 0.0;
  double height = 0.0;
  double width_nm = 0.0;  // full width at half prominence
};

/// xi0 = 2 m f L cot(theta0) / h, in nm per nm^2.
double spin_echo_constant(double rf_frequency_hz, double arm_length_m, double theta0_rad);

double xi_of_lambda(const InstrumentConfig& inst, double lambda_nm);
double lambda_of_xi(const InstrumentConfig& inst, double xi_nm);

/// Gaussian resolution width in spin echo length,
/// delta_xi = xi sqrt(4 dtheta^2/sin^2(2 theta0) + 4 (dlambda^2 + db^2)/(xi/xi0)
///              + dJ^2/xi^2) with dlambda = a_lambda + b_lambda sqrt(xi/xi0).
double resolution_sigma(const InstrumentConfig& inst, const ResolutionParams& res,
                        double xi_nm);

/// Heteroscedastic Gaussian smearing: every output point integrates the input
/// pattern against a +-6 sigma truncated, renormalized Gaussian with
/// sigma = resolution_sigma at that point. The grid must resolve the kernel
/// (spacing <= sigma/4 wherever sigma > 0).
EchoPattern convolve_resolution(const EchoPattern& pattern, const InstrumentConfig& inst,
                                const ResolutionParams& res);

/// Piecewise-linear interpolant with flat extrapolation.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(Eigen::ArrayXd x, Eigen::ArrayXd y);
  double operator()(double x) const;
  double x_min() const { return x_.size() ? x_(0) : 0.0; }
  double x_max() const { return x_.size() ? x_(x_.size() - 1) : 0.0; }
  const Eigen::ArrayXd& nodes_x() const { return x_; }
  const Eigen::ArrayXd& nodes_y() const { return y_; }

 private:
  Eigen::ArrayXd x_, y_;
};

/// Background under the echo peaks, interpolated from the local minima between
/// successive peaks. Needs at least two minima (>= 2 periods of data).
PiecewiseLinear fit_background(const EchoPattern& pattern, double period_nm);

struct FindPeaksResult {
  std::vector<PeakEstimate> peaks;
  std::vector<std::string> warnings;
};

/// One PeakEstimate per window [n p - p/2, n p + p/2] whose center lies in the
/// pattern: sample maximum, its location, and the full width at half
/// prominence over the fitted background. Empty windows are skipped with a
/// warning record.
FindPeaksResult find_peaks(const EchoPattern& pattern, double period_nm);

/// De-trend: (P - bg)/(1 - bg), mapping peak apexes to 1 and the fitted
/// background to 0.
EchoPattern detrend(const EchoPattern& pattern, const PiecewiseLinear& bg);

}  // namespace sesans
