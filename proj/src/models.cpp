#include "sesans/models.hpp"

#include <cmath>
#include <sstream>

#include "sesans/constants.hpp"
#include "sesans/errors.hpp"

namespace sesans {

std::vector<std::string> check_packet(const WavePacketSpec& p) {
  std::vector<std::string> v;
  if (!(p.delta_nm > 0.0))
    v.push_back("packet: delta_nm must be positive (or infinite for the plane-wave limit)");
  if (p.k0_nm_inv[1] != 0.0) v.push_back("packet: k0y must be 0");
  if (!(p.k0z() > 0.0)) v.push_back("packet: k0z must be positive");
  return v;
}

double plane_wave_polarization(const GratingSpec& g, PhaseShift phi, double xi_nm) {
  const double p = g.period_nm();
  double x = xi_nm - p * std::floor(xi_nm / p);
  const double xmin = g.xi_tilde_min_nm();
  const double xmax = g.xi_tilde_max_nm();
  const double c = 1.0 - std::cos(phi.rad);
  if (x <= xmin) return 1.0 - 2.0 * c * x / p;
  if (x <= xmax) return 1.0 - 2.0 * xmin * c / p;
  return 1.0 + 2.0 * c * (x - p) / p;
}

double damping(double xi_nm, const WavePacketSpec& packet) {
  if (packet.is_plane_wave()) return 1.0;
  const double r = xi_nm / packet.delta_nm;
  return std::exp(-0.5 * r * r);
}

double semiclassical_polarization(const GratingSpec& g, PhaseShift phi, double xi_nm,
                                  const WavePacketSpec& packet) {
  return damping(xi_nm, packet) * plane_wave_polarization(g, phi, xi_nm);
}

double fourier_series_polarization(const GratingSpec& g, PhaseShift phi, double xi_nm,
                                   long n_max) {
  if (n_max < 1)
    throw Error(ErrorCategory::validation, "fourier_series_polarization: n_max must be >= 1");
  const double p = g.period_nm();
  const double c0 = std::norm(fourier_coefficient(g, phi, 0));
  // |c_n| is even in n; the unit-modulus grating makes the Parseval total
  // exactly 1, which serves as the normalization.
  const std::complex<double> w = std::polar(1.0, phi.rad) - 1.0;
  const double w2 = std::norm(w);
  const double theta = 2.0 * kPi * g.a_nm / p;
  const double step = 2.0 * kPi * xi_nm / p;
  double num = c0;
  for (long n = 1; n <= n_max; ++n) {
    const double s = std::sin(theta * static_cast<double>(n)) / (kPi * static_cast<double>(n));
    num += 2.0 * w2 * s * s * std::cos(step * static_cast<double>(n));
  }
  return num;
}

PhaseShift tof_phase(const GratingSpec& g, double lambda_nm) {
  if (!(lambda_nm > 0.0))
    throw Error(ErrorCategory::validation, "tof_phase: lambda_nm must be positive");
  return PhaseShift{g.sld_per_nm2 * g.depth_nm * lambda_nm};
}

std::array<double, 2> tof_band_nm(const InstrumentConfig& inst) {
  return {inst.xi0_nm_per_nm2 * inst.lambda_min_nm * inst.lambda_min_nm,
          inst.xi0_nm_per_nm2 * inst.lambda_max_nm * inst.lambda_max_nm};
}

namespace {

void require_in_band(const InstrumentConfig& inst, double xi_nm, const char* op) {
  const auto band = tof_band_nm(inst);
  if (xi_nm < band[0] || xi_nm > band[1]) {
    std::ostringstream os;
    os << op << ": xi = " << xi_nm << " nm outside the admissible interval [" << band[0]
       << ", " << band[1] << "] nm set by the wavelength band";
    throw Error(ErrorCategory::band, os.str());
  }
}

}  // namespace

EchoPattern tof_pattern(const GratingSpec& g, const InstrumentConfig& inst,
                        const Eigen::ArrayXd& xi_grid_nm) {
  EchoPattern out;
  out.xi_nm = xi_grid_nm;
  out.polarization.resize(xi_grid_nm.size());
  for (Eigen::Index i = 0; i < xi_grid_nm.size(); ++i) {
    const double xi = xi_grid_nm(i);
    require_in_band(inst, xi, "tof_pattern");
    const double lambda = lambda_of_xi(inst, xi);
    out.polarization(i) = plane_wave_polarization(g, tof_phase(g, lambda), xi);
  }
  return out;
}

double background(const GratingSpec& g, const InstrumentConfig& inst, double xi_nm) {
  require_in_band(inst, xi_nm, "background");
  const double p = g.period_nm();
  const double frac = 2.0 * g.xi_tilde_min_nm() / p;
  const double phi = g.sld_per_nm2 * g.depth_nm * std::sqrt(xi_nm / inst.xi0_nm_per_nm2);
  return 1.0 - frac * (1.0 - std::cos(phi));
}

}  // namespace sesans
