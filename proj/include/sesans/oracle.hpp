#pragma once

#include <complex>
#include <string>
#include <vector>

#include "sesans/grating.hpp"
#include "sesans/models.hpp"

namespace sesans {

/// Uniform neutron beam profile: distribution of packet impact parameters.
struct BeamProfile {
  double width_nm = 0.0;
  int n_impact_samples = 16;
};

std::vector<std::string> check_beam(const BeamProfile& b);

/// Two-component spin state in the x basis.
struct Spinor {
  std::complex<double> up_x;
  std::complex<double> down_x;
  double norm() const { return std::sqrt(std::norm(up_x) + std::norm(down_x)); }
};

/// |chi_q> = (e^{-iq/2} |up>_x - i e^{+iq/2} |down>_x) / sqrt(2), q = k.xi.
Spinor entangled_state(double k_dot_xi);
Spinor entangled_state(const std::array<double, 2>& k_yz_nm_inv,
                       const std::array<double, 2>& xi_yz_nm);

/// <bra| sigma^y |ket> in the x basis; for entangled states this equals
/// cos((q1 + q2)/2).
std::complex<double> sigma_y_expectation(const Spinor& bra, const Spinor& ket);

/// hbar k^2 / (2 m), k in 1/nm, result in rad/s.
double dispersion(double k_nm_inv);

/// Numerical grids for the wave-packet quadratures. The incident k_y grid
/// spans +-n_sigma/Delta about k0y with n_k points; real-space grids target
/// dy_target_nm (tightened so xi/2 is always grid-commensurate) and are padded
/// to a power of two >= 256 for the transforms. grid_scale multiplies all
/// densities for convergence studies.
struct QuadratureGrid {
  int n_k = 1024;
  double n_sigma = 8.0;
  double dy_target_nm = 2.5;
  double tolerance = 5e-3;
  double grid_scale = 1.0;
};

std::vector<std::string> check_grid(const QuadratureGrid& grid);

/// Scattering amplitude at a single scattered momentum:
/// f(q_y; y0) = int dk_y g_y(k_y) e^{-i k_y y0} F(k_y - q_y), with F the
/// aperture-limited transform of T over n_periods. Direct quadrature on the
/// incident k_y grid with a doubling check.
std::complex<double> scattering_amplitude(const WavePacketSpec& packet, const GratingSpec& g,
                                          PhaseShift phi, double y0_nm, double q_y_nm_inv,
                                          const QuadratureGrid& grid = {});

/// Single-path oracle: beam-averaged int dq |f(q;y0)|^2 cos(q xi),
/// normalized. The scattered-momentum integral runs over the full transform
/// band; the spectrum is cached so that xi sweeps are cheap.
class SemiclassicalOracle {
 public:
  SemiclassicalOracle(const WavePacketSpec& packet, const GratingSpec& g, PhaseShift phi,
                      const BeamProfile& beam, double xi_max_nm,
                      const QuadratureGrid& grid = {},
                      std::vector<std::string>* warnings = nullptr);
  /// Polarization at xi; errors if the base and doubled grids disagree.
  double evaluate(double xi_nm) const;

 private:
  struct Spectrum {
    std::vector<double> weight;  // beam-summed |f(k)|^2
    double dk = 0.0;
    int n = 0;
    double dy = 0.0;
  };
  Spectrum base_, doubled_;
  double tolerance_;
  double eval_on(const Spectrum& s, double xi_nm) const;
};

/// One-shot wrappers. The instrument overload takes the wall phase from the
/// time-of-flight relation at xi; the explicit-phase overload pins it.
double semiclassical_polarization_numeric(const WavePacketSpec& packet, const GratingSpec& g,
                                          const BeamProfile& beam, PhaseShift phi,
                                          double xi_nm, const QuadratureGrid& grid = {},
                                          std::vector<std::string>* warnings = nullptr);
double semiclassical_polarization_numeric(const WavePacketSpec& packet, const GratingSpec& g,
                                          const BeamProfile& beam,
                                          const InstrumentConfig& inst, double xi_nm,
                                          const QuadratureGrid& grid = {},
                                          std::vector<std::string>* warnings = nullptr);

/// Two-path oracle: builds the disentangled spinor state in the scattered
/// momentum representation (each spin component diffracts off the grating
/// displaced by -+xi/2) and integrates the sigma^y density against |chi>
/// weights. time_s evolves the free packet phases e^{-i omega(k) t} before the
/// grating; the polarization must not depend on it.
double quantum_polarization_numeric(const WavePacketSpec& packet, const GratingSpec& g,
                                    const BeamProfile& beam, double xi_nm, PhaseShift phi,
                                    const QuadratureGrid& grid = {},
                                    std::vector<std::string>* warnings = nullptr,
                                    double time_s = 0.0);

/// Same reduction evaluated in real space (the identity the momentum route
/// must reproduce): int dy Re[T*(y + xi/2) T(y - xi/2)] |psi(y - y0)|^2,
/// beam-averaged and normalized. Exposed for cross-checks.
double quantum_reduced_identity(const WavePacketSpec& packet, const GratingSpec& g,
                                const BeamProfile& beam, double xi_nm, PhaseShift phi,
                                const QuadratureGrid& grid = {});

/// Beam-averaged integral of |f(q)|^2 over the scattered momenta, in the
/// normalization where the incident packet carries unit norm. The phase
/// grating is unitary, so this must return 1 to quadrature tolerance.
double packet_norm_numeric(const WavePacketSpec& packet, const GratingSpec& g, PhaseShift phi,
                           const BeamProfile& beam, const QuadratureGrid& grid = {});

/// Control pipeline with the spinor factored out at the mean momentum: the
/// packet, not just the grating, is displaced by -+xi/2 per spin component, so
/// the shifted-packet overlap reappears and with it the single-path damping.
double unentangled_control(const WavePacketSpec& packet, const GratingSpec& g,
                           const BeamProfile& beam, double xi_nm, PhaseShift phi,
                           const QuadratureGrid& grid = {},
                           std::vector<std::string>* warnings = nullptr);

}  // namespace sesans
