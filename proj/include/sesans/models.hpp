#pragma once

#include <array>
#include <limits>

#include "sesans/grating.hpp"
#include "sesans/instrument.hpp"
#include "sesans/pattern.hpp"

namespace sesans {

/// Incident Gaussian wave packet. delta_nm is the transverse width scale; the
/// plane-wave limit is the distinguished value infinity, never a large float.
struct WavePacketSpec {
  double delta_nm = std::numeric_limits<double>::infinity();
  std::array<double, 3> k0_nm_inv = {0.0, 0.0, 12.566370614359172};  // (k0x, k0y=0, k0z)

  bool is_plane_wave() const { return std::isinf(delta_nm); }
  double k0z() const { return k0_nm_inv[2]; }

  static WavePacketSpec plane_wave() { return WavePacketSpec{}; }
  static WavePacketSpec gaussian(double delta_nm_, double k0z_nm_inv = 12.566370614359172) {
    return WavePacketSpec{delta_nm_, {0.0, 0.0, k0z_nm_inv}};
  }
};

std::vector<std::string> check_packet(const WavePacketSpec& p);

/// Three-branch closed form of the plane-wave echo polarization, periodic in
/// xi with the grating period.
double plane_wave_polarization(const GratingSpec& g, PhaseShift phi, double xi_nm);

/// Single-path Gaussian damping G = exp(-xi^2 / (2 Delta^2)); exactly 1 in the
/// plane-wave limit.
double damping(double xi_nm, const WavePacketSpec& packet);

/// Single-path model: damping times the plane-wave autocorrelation curve.
double semiclassical_polarization(const GratingSpec& g, PhaseShift phi, double xi_nm,
                                  const WavePacketSpec& packet);

/// Diffraction-order route to the same curve: sum over |c_n|^2 cos(2 pi n xi/p)
/// for |n| <= n_max, normalized by the exact Parseval total (=1 for a
/// unit-modulus grating). Third, independent route next to the closed form and
/// the quadrature autocorrelation.
double fourier_series_polarization(const GratingSpec& g, PhaseShift phi, double xi_nm,
                                   long n_max);

/// Wall phase accumulated at wavelength lambda: phi = rho * h * lambda.
PhaseShift tof_phase(const GratingSpec& g, double lambda_nm);

/// Admissible spin echo band [xi0 lambda_min^2, xi0 lambda_max^2] of a
/// time-of-flight configuration.
std::array<double, 2> tof_band_nm(const InstrumentConfig& inst);

/// Ideal (resolution-free) time-of-flight pattern: at each xi the wavelength,
/// and with it the wall phase, follows from xi = xi0 lambda^2.
EchoPattern tof_pattern(const GratingSpec& g, const InstrumentConfig& inst,
                        const Eigen::ArrayXd& xi_grid_nm);

/// Plateau envelope under the TOF peaks:
/// BG(xi) = 1 - (2 min(2a, b-a)/p) (1 - cos(rho h sqrt(xi/xi0))).
double background(const GratingSpec& g, const InstrumentConfig& inst, double xi_nm);

}  // namespace sesans
