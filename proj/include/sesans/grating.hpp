#pragma once

#include <complex>
#include <string>
#include <vector>

namespace sesans {

/// One-dimensional periodic phase grating. The canonical unit cell is
/// (-a, b]: silicon wall on (-a, a] (width 2a), open channel on (a, b]
/// (width b-a), period p = a + b.
struct GratingSpec {
  double a_nm = 0.0;          // half wall width
  double b_nm = 0.0;
  double depth_nm = 0.0;      // h, along the beam
  double sld_per_nm2 = 0.0;   // scattering length density rho
  int n_periods = 1;          // finite-extent truncation used by the oracle

  double period_nm() const { return a_nm + b_nm; }
  double wall_width_nm() const { return 2.0 * a_nm; }
  double channel_width_nm() const { return b_nm - a_nm; }
  /// Breakpoints of the piecewise echo polarization.
  double xi_tilde_min_nm() const;
  double xi_tilde_max_nm() const;
};

/// Phase accumulated by a neutron crossing one grating wall.
struct PhaseShift {
  double rad = 0.0;
};

/// Returns every violated invariant (empty when valid).
std::vector<std::string> check_grating(const GratingSpec& g);
/// Throws Error(validation) listing all violations at once.
void validate_grating(const GratingSpec& g);

/// Unit-modulus transmission T(y): e^{i phi} on the wall, 1 on the channel,
/// y reduced into the canonical cell (-a, b] by floor division.
std::complex<double> transmission(const GratingSpec& g, PhaseShift phi, double y_nm);

/// (1/p) Re \int_{-p/2}^{p/2} T*(y) T(y+shift) dy by composite quadrature on a
/// jump-aligned mesh (default ~1e6 points) with a Richardson doubling check.
/// Cross-check partner of models::plane_wave_polarization; never the closed form.
double autocorrelation(const GratingSpec& g, PhaseShift phi, double shift_nm,
                       long n_points = 1000000, double rel_tol = 1e-8);

/// Closed-form Fourier coefficient c_n of T over one period.
std::complex<double> fourier_coefficient(const GratingSpec& g, PhaseShift phi, long n);

/// Grating rotated about the optic axis: channels inclined at tilt_rad to the
/// encoding direction scale both a and b by 1/sin(tilt).
GratingSpec effective_grating(const GratingSpec& g, double tilt_rad);

}  // namespace sesans
