#include "sesans/oracle.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sesans/constants.hpp"
#include "sesans/errors.hpp"

namespace sesans {

std::vector<std::string> check_beam(const BeamProfile& b) {
  std::vector<std::string> v;
  if (!(b.width_nm > 0.0)) v.push_back("beam: width_nm must be positive");
  if (b.n_impact_samples < 16) v.push_back("beam: n_impact_samples must be >= 16");
  return v;
}

Spinor entangled_state(double k_dot_xi) {
  const double q = 0.5 * k_dot_xi;
  const std::complex<double> i(0.0, 1.0);
  return {std::polar(1.0, -q) / std::sqrt(2.0), -i * std::polar(1.0, q) / std::sqrt(2.0)};
}

Spinor entangled_state(const std::array<double, 2>& k_yz_nm_inv,
                       const std::array<double, 2>& xi_yz_nm) {
  return entangled_state(k_yz_nm_inv[0] * xi_yz_nm[0] + k_yz_nm_inv[1] * xi_yz_nm[1]);
}

std::complex<double> sigma_y_expectation(const Spinor& bra, const Spinor& ket) {
  // sigma^y in this x-basis convention: [[0, i], [-i, 0]].
  const std::complex<double> i(0.0, 1.0);
  return i * std::conj(bra.up_x) * ket.down_x - i * std::conj(bra.down_x) * ket.up_x;
}

double dispersion(double k_nm_inv) {
  const double k = k_nm_inv * 1e9;  // 1/m
  return PhysicalConstants::hbar_Js * k * k / (2.0 * PhysicalConstants::neutron_mass_kg);
}

std::vector<std::string> check_grid(const QuadratureGrid& grid) {
  std::vector<std::string> v;
  auto pow2 = [](int n) { return n >= 256 && (n & (n - 1)) == 0; };
  if (!pow2(grid.n_k)) v.push_back("grid: n_k must be a power of two >= 256");
  if (!(grid.n_sigma >= 6.0)) v.push_back("grid: k range must cover >= 6 sigma of g_y");
  if (!(grid.dy_target_nm > 0.0)) v.push_back("grid: dy_target_nm must be positive");
  if (!(grid.tolerance > 0.0)) v.push_back("grid: tolerance must be positive");
  if (!(grid.grid_scale > 0.0)) v.push_back("grid: grid_scale must be positive");
  return v;
}

namespace {

constexpr double kSupportSigmas = 5.0;  // |psi(5 Delta)|^2 ~ 2e-22

int next_pow2(long n) {
  int m = 256;
  while (m < n) m *= 2;
  return m;
}

// Free Gaussian packet at optional evolution time, alpha = hbar t / (2 m) in
// nm^2. Normalized so that int |psi|^2 dy = 2 pi, matching the momentum
// density g_y^2 integrating to 1.
struct Packet {
  double delta;
  std::complex<double> beta;  // delta^2/4 + i alpha
  std::complex<double> prefactor;

  Packet(double delta_nm, double alpha_nm2) : delta(delta_nm) {
    beta = std::complex<double>(delta * delta / 4.0, alpha_nm2);
    const double norm = std::sqrt(delta / std::sqrt(2.0 * kPi));
    prefactor = norm * std::sqrt(kPi / beta);
  }
  std::complex<double> operator()(double u) const {
    if (beta.imag() == 0.0)
      return prefactor * std::exp(-u * u / (4.0 * beta.real()));
    return prefactor * std::exp(-u * u / (4.0 * beta));
  }
};

struct WaveGrid {
  double dy = 0.0;
  long n_window = 0;  // physical samples
  int n_fft = 0;
  long shift_cells = 0;  // xi/2 in grid cells
};

// Real-space mesh: xi/2 commensurate with dy so momentum-space phase pairing
// is an exact lattice shift; padding covers the correlation lag.
WaveGrid make_wave_grid(double delta_nm, double xi_nm, double period_nm,
                        const QuadratureGrid& grid, double pad_xi_nm) {
  WaveGrid wg;
  double dy = grid.dy_target_nm / grid.grid_scale;
  if (xi_nm > 0.0) {
    const long m = std::max<long>(1, std::lround(xi_nm / (2.0 * dy)));
    dy = xi_nm / (2.0 * static_cast<double>(m));
    wg.shift_cells = m;
  }
  wg.dy = dy;
  const double half = kSupportSigmas * delta_nm + xi_nm / 2.0 + 4.0 * period_nm;
  wg.n_window = static_cast<long>(std::ceil(2.0 * half / dy));
  const long lag = static_cast<long>(std::ceil(pad_xi_nm / dy)) + 2;
  wg.n_fft = next_pow2(wg.n_window + std::max(2 * wg.shift_cells, lag));
  return wg;
}

thread_local Eigen::FFT<double> g_fft;

// Scattered-momentum amplitude of the packet centered at `center`, windowed
// around window_center: A[l] ~ sum_j T(y_j) psi(y_j - center) e^{-i k_l y_j}.
// The common phase e^{-i k y_start} cancels in every product used here.
void packet_amplitude(const GratingSpec& g, PhaseShift phi, const Packet& pk,
                      double window_center, double center, const WaveGrid& wg,
                      std::vector<std::complex<double>>& out) {
  const double half = 0.5 * wg.dy * static_cast<double>(wg.n_window);
  std::vector<std::complex<double>> psi_T(wg.n_fft, std::complex<double>(0.0, 0.0));
  for (long j = 0; j < wg.n_window; ++j) {
    const double y = window_center - half + (static_cast<double>(j) + 0.5) * wg.dy;
    psi_T[static_cast<size_t>(j)] = transmission(g, phi, y) * pk(y - center);
  }
  g_fft.fwd(out, psi_T);
}

double wrapped_k(int l, int n_fft, double dy) {
  const int half = n_fft / 2;
  const int m = l < half ? l : l - n_fft;
  return 2.0 * kPi * static_cast<double>(m) / (static_cast<double>(n_fft) * dy);
}

void oracle_preconditions(const WavePacketSpec& packet, const GratingSpec& g,
                          const BeamProfile& beam, double xi_nm,
                          std::vector<std::string>* warnings) {
  if (packet.is_plane_wave())
    throw Error(ErrorCategory::validation,
                "oracle: requires a finite packet width (plane-wave limit is closed-form)");
  auto issues = check_packet(packet);
  auto bs = check_beam(beam);
  issues.insert(issues.end(), bs.begin(), bs.end());
  if (!issues.empty()) throw Error(ErrorCategory::validation, issues.front());
  const double p = g.period_nm();
  if (packet.k0z() * p < 50.0)
    throw Error(ErrorCategory::validation,
                "oracle: k0z too small for the kz' ~ k0z approximation (need k0z >> 1/p)");
  if (warnings && beam.width_nm <= std::max({packet.delta_nm, p, xi_nm})) {
    warnings->push_back(
        "oracle: beam width <= max(Delta, p, xi); the wide-beam approximation phi_B ~ 1 "
        "may not hold");
  }
  const double need =
      beam.width_nm / 2.0 + kSupportSigmas * packet.delta_nm + xi_nm / 2.0 + 4.0 * p;
  if (g.n_periods * p / 2.0 < need) {
    std::ostringstream os;
    os << "oracle: packet support reaches the grating aperture edge; need n_periods >= "
       << static_cast<long>(std::ceil(2.0 * need / p)) << " (have " << g.n_periods << ")";
    throw Error(ErrorCategory::validation, os.str());
  }
}

double impact_parameter(const BeamProfile& beam, int j) {
  return -beam.width_nm / 2.0 +
         (static_cast<double>(j) + 0.5) * beam.width_nm / beam.n_impact_samples;
}

void check_converged(double base, double fine, double tol, const char* op) {
  if (std::abs(base - fine) > tol) {
    std::ostringstream os;
    os << op << ": grid doubling moved the polarization from " << base << " to " << fine
       << " (change " << std::abs(base - fine) << " > tolerance " << tol << ")";
    throw Error(ErrorCategory::convergence, os.str());
  }
}

// ---- two-path (entangled) oracle -------------------------------------------

double quantum_once(const WavePacketSpec& packet, const GratingSpec& g,
                    const BeamProfile& beam, double xi_nm, PhaseShift phi,
                    const QuadratureGrid& grid, double alpha_nm2) {
  const WaveGrid wg = make_wave_grid(packet.delta_nm, xi_nm, g.period_nm(), grid, 0.0);
  const Packet pk(packet.delta_nm, alpha_nm2);
  std::vector<std::complex<double>> a_minus, a_plus;
  double num = 0.0, den = 0.0;
  for (int j = 0; j < beam.n_impact_samples; ++j) {
    const double y0 = impact_parameter(beam, j);
    packet_amplitude(g, phi, pk, y0, y0 - xi_nm / 2.0, wg, a_minus);
    packet_amplitude(g, phi, pk, y0, y0 + xi_nm / 2.0, wg, a_plus);
    for (int l = 0; l < wg.n_fft; ++l) {
      const double k = wrapped_k(l, wg.n_fft, wg.dy);
      // Disentangled spinor in the scattered-momentum representation: each
      // component carries the amplitude of the grating displaced by -+xi/2
      // and the |chi_{kappa xi}> phase at this k.
      const std::complex<double> half_phase = std::polar(1.0, 0.5 * k * xi_nm);
      const Spinor state{half_phase * a_plus[static_cast<size_t>(l)] / std::sqrt(2.0),
                         std::complex<double>(0.0, -1.0) * std::conj(half_phase) *
                             a_minus[static_cast<size_t>(l)] / std::sqrt(2.0)};
      num += std::real(sigma_y_expectation(state, state));
      den += std::norm(state.up_x) + std::norm(state.down_x);
    }
  }
  return num / den;
}

// ---- real-space meshes ------------------------------------------------------

// Cell edges over [lo, hi]: uniform step <= dy, split at every jump of
// T(y + s) for each shift s in `shifts`.
std::vector<double> jump_refined_edges(const GratingSpec& g, double lo, double hi, double dy,
                                       const std::vector<double>& shifts) {
  const double a = g.a_nm, p = g.period_nm();
  std::vector<double> brk{lo, hi};
  for (double s : shifts) {
    for (double e : {-a - s, a - s}) {
      double first = e + p * std::ceil((lo - e) / p);
      for (double x = first; x < hi; x += p)
        if (x > lo && x < hi) brk.push_back(x);
    }
  }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end(),
                        [&](double x, double y) { return std::abs(x - y) < 1e-9; }),
            brk.end());
  std::vector<double> edges;
  edges.reserve(static_cast<size_t>((hi - lo) / dy) + brk.size() + 2);
  for (size_t i = 0; i + 1 < brk.size(); ++i) {
    const double l = brk[i], r = brk[i + 1];
    const long n = std::max<long>(1, static_cast<long>(std::ceil((r - l) / dy)));
    const double h = (r - l) / static_cast<double>(n);
    for (long j = 0; j < n; ++j) edges.push_back(l + h * static_cast<double>(j));
  }
  edges.push_back(hi);
  return edges;
}

double reduced_identity_once(const WavePacketSpec& packet, const GratingSpec& g,
                             const BeamProfile& beam, double xi_nm, PhaseShift phi,
                             const QuadratureGrid& grid) {
  const double dy = grid.dy_target_nm / grid.grid_scale;
  const double half = kSupportSigmas * packet.delta_nm + 4.0 * g.period_nm();
  const Packet pk(packet.delta_nm, 0.0);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < beam.n_impact_samples; ++j) {
    const double y0 = impact_parameter(beam, j);
    const auto edges =
        jump_refined_edges(g, y0 - half, y0 + half, dy, {xi_nm / 2.0, -xi_nm / 2.0});
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
      const double w = edges[i + 1] - edges[i];
      const double y = 0.5 * (edges[i] + edges[i + 1]);
      const double corr = std::real(std::conj(transmission(g, phi, y + xi_nm / 2.0)) *
                                    transmission(g, phi, y - xi_nm / 2.0));
      const double weight = std::norm(pk(y - y0));
      num += corr * weight * w;
      den += weight * w;
    }
  }
  return num / den;
}

double control_once(const WavePacketSpec& packet, const GratingSpec& g,
                    const BeamProfile& beam, double xi_nm, PhaseShift phi,
                    const QuadratureGrid& grid) {
  const double dy = grid.dy_target_nm / grid.grid_scale;
  const double half = kSupportSigmas * packet.delta_nm + xi_nm / 2.0 + 4.0 * g.period_nm();
  const Packet pk(packet.delta_nm, 0.0);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < beam.n_impact_samples; ++j) {
    const double y0 = impact_parameter(beam, j);
    const auto edges =
        jump_refined_edges(g, y0 - half, y0 + half, dy, {xi_nm / 2.0, -xi_nm / 2.0});
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
      const double w = edges[i + 1] - edges[i];
      const double y = 0.5 * (edges[i] + edges[i + 1]);
      // Whole single-path state displaced per spin component: grating phase
      // and packet envelope move together, unlike the entangled case.
      const std::complex<double> theta_p =
          transmission(g, phi, y + xi_nm / 2.0) * pk(y + xi_nm / 2.0 - y0);
      const std::complex<double> theta_m =
          transmission(g, phi, y - xi_nm / 2.0) * pk(y - xi_nm / 2.0 - y0);
      num += std::real(std::conj(theta_p) * theta_m) * w;
      den += 0.5 * (std::norm(theta_p) + std::norm(theta_m)) * w;
    }
  }
  return num / den;
}

}  // namespace

// ---- public entry points ----------------------------------------------------

double quantum_polarization_numeric(const WavePacketSpec& packet, const GratingSpec& g,
                                    const BeamProfile& beam, double xi_nm, PhaseShift phi,
                                    const QuadratureGrid& grid,
                                    std::vector<std::string>* warnings, double time_s) {
  oracle_preconditions(packet, g, beam, xi_nm, warnings);
  const double alpha =
      PhysicalConstants::hbar_Js * time_s / (2.0 * PhysicalConstants::neutron_mass_kg) * 1e18;
  const double base = quantum_once(packet, g, beam, xi_nm, phi, grid, alpha);
  QuadratureGrid fine = grid;
  fine.grid_scale *= 2.0;
  const double refined = quantum_once(packet, g, beam, xi_nm, phi, fine, alpha);
  check_converged(base, refined, grid.tolerance, "quantum_polarization_numeric");
  return refined;
}

double quantum_reduced_identity(const WavePacketSpec& packet, const GratingSpec& g,
                                const BeamProfile& beam, double xi_nm, PhaseShift phi,
                                const QuadratureGrid& grid) {
  oracle_preconditions(packet, g, beam, xi_nm, nullptr);
  return reduced_identity_once(packet, g, beam, xi_nm, phi, grid);
}

double unentangled_control(const WavePacketSpec& packet, const GratingSpec& g,
                           const BeamProfile& beam, double xi_nm, PhaseShift phi,
                           const QuadratureGrid& grid, std::vector<std::string>* warnings) {
  oracle_preconditions(packet, g, beam, xi_nm, warnings);
  const double base = control_once(packet, g, beam, xi_nm, phi, grid);
  QuadratureGrid fine = grid;
  fine.grid_scale *= 2.0;
  const double refined = control_once(packet, g, beam, xi_nm, phi, fine);
  check_converged(base, refined, grid.tolerance, "unentangled_control");
  return refined;
}

SemiclassicalOracle::SemiclassicalOracle(const WavePacketSpec& packet, const GratingSpec& g,
                                         PhaseShift phi, const BeamProfile& beam,
                                         double xi_max_nm, const QuadratureGrid& grid,
                                         std::vector<std::string>* warnings)
    : tolerance_(grid.tolerance) {
  oracle_preconditions(packet, g, beam, xi_max_nm, warnings);
  const Packet pk(packet.delta_nm, 0.0);
  auto build = [&](const QuadratureGrid& gr, Spectrum& s) {
    const WaveGrid wg = make_wave_grid(packet.delta_nm, 0.0, g.period_nm(), gr, xi_max_nm);
    s.dy = wg.dy;
    s.n = wg.n_fft;
    s.dk = 2.0 * kPi / (static_cast<double>(wg.n_fft) * wg.dy);
    s.weight.assign(static_cast<size_t>(wg.n_fft), 0.0);
    std::vector<std::complex<double>> amp;
    for (int j = 0; j < beam.n_impact_samples; ++j) {
      const double y0 = impact_parameter(beam, j);
      packet_amplitude(g, phi, pk, y0, y0, wg, amp);
      for (int l = 0; l < wg.n_fft; ++l)
        s.weight[static_cast<size_t>(l)] += std::norm(amp[static_cast<size_t>(l)]);
    }
  };
  build(grid, base_);
  QuadratureGrid fine = grid;
  fine.grid_scale *= 2.0;
  build(fine, doubled_);
}

double SemiclassicalOracle::eval_on(const Spectrum& s, double xi_nm) const {
  double num = 0.0, den = 0.0;
  for (int l = 0; l < s.n; ++l) {
    const double k = wrapped_k(l, s.n, s.dy);
    num += s.weight[static_cast<size_t>(l)] * std::cos(k * xi_nm);
    den += s.weight[static_cast<size_t>(l)];
  }
  return num / den;
}

double SemiclassicalOracle::evaluate(double xi_nm) const {
  const double base = eval_on(base_, xi_nm);
  const double refined = eval_on(doubled_, xi_nm);
  check_converged(base, refined, tolerance_, "semiclassical_polarization_numeric");
  return refined;
}

double packet_norm_numeric(const WavePacketSpec& packet, const GratingSpec& g, PhaseShift phi,
                           const BeamProfile& beam, const QuadratureGrid& grid) {
  oracle_preconditions(packet, g, beam, 0.0, nullptr);
  const WaveGrid wg = make_wave_grid(packet.delta_nm, 0.0, g.period_nm(), grid, 0.0);
  const Packet pk(packet.delta_nm, 0.0);
  std::vector<std::complex<double>> amp;
  double total = 0.0;
  for (int j = 0; j < beam.n_impact_samples; ++j) {
    const double y0 = impact_parameter(beam, j);
    packet_amplitude(g, phi, pk, y0, y0, wg, amp);
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    // A(k) = (dy / 2 pi) FFT; sum |A|^2 dk collapses to dy/(2 pi N) sum |FFT|^2
    total += s * wg.dy / (2.0 * kPi * static_cast<double>(wg.n_fft));
  }
  return total / beam.n_impact_samples;
}

double semiclassical_polarization_numeric(const WavePacketSpec& packet, const GratingSpec& g,
                                          const BeamProfile& beam, PhaseShift phi,
                                          double xi_nm, const QuadratureGrid& grid,
                                          std::vector<std::string>* warnings) {
  SemiclassicalOracle oracle(packet, g, phi, beam, xi_nm, grid, warnings);
  return oracle.evaluate(xi_nm);
}

double semiclassical_polarization_numeric(const WavePacketSpec& packet, const GratingSpec& g,
                                          const BeamProfile& beam,
                                          const InstrumentConfig& inst, double xi_nm,
                                          const QuadratureGrid& grid,
                                          std::vector<std::string>* warnings) {
  const PhaseShift phi = tof_phase(g, lambda_of_xi(inst, xi_nm));
  return semiclassical_polarization_numeric(packet, g, beam, phi, xi_nm, grid, warnings);
}

std::complex<double> scattering_amplitude(const WavePacketSpec& packet, const GratingSpec& g,
                                          PhaseShift phi, double y0_nm, double q_y_nm_inv,
                                          const QuadratureGrid& grid) {
  if (packet.is_plane_wave())
    throw Error(ErrorCategory::validation, "scattering_amplitude: requires a finite packet");
  const double delta = packet.delta_nm;
  const double a = g.a_nm, p = g.period_nm();
  const long K = std::max(1, g.n_periods / 2);  // aperture: 2K+1 whole periods
  const double w_g = (2.0 * K + 1.0) * p;
  const std::complex<double> wphase = std::polar(1.0, phi.rad) - 1.0;

  // Aperture-limited transform of T, exact per piece.
  auto F = [&](double kappa) -> std::complex<double> {
    double open_part, dirichlet;
    if (std::abs(kappa) < 1e-14) {
      open_part = w_g;
      dirichlet = 2.0 * static_cast<double>(K) + 1.0;
    } else {
      open_part = 2.0 * std::sin(kappa * w_g / 2.0) / kappa;
      const double x = kappa * p / 2.0;
      const double sx = std::sin(x);
      if (std::abs(sx) < 1e-12) {
        // at a grating order the kernel peaks at exactly 2K+1
        dirichlet = (2.0 * K + 1.0) * std::cos((2.0 * K + 1.0) * x) / std::cos(x);
      } else {
        dirichlet = std::sin((2.0 * K + 1.0) * x) / sx;
      }
    }
    const double wall_part =
        std::abs(kappa) < 1e-14 ? 2.0 * a : 2.0 * std::sin(kappa * a) / kappa;
    return (open_part + wphase * dirichlet * wall_part) / (2.0 * kPi);
  };

  auto integrate = [&](int n_k) -> std::complex<double> {
    const double gnorm = std::sqrt(delta / std::sqrt(2.0 * kPi));
    const double kmax = grid.n_sigma / delta;
    const double dk = 2.0 * kmax / static_cast<double>(n_k);
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < n_k; ++j) {
      const double k = -kmax + (static_cast<double>(j) + 0.5) * dk;
      const double gk = gnorm * std::exp(-delta * delta * k * k / 4.0);
      acc += gk * std::polar(1.0, -k * y0_nm) * F(k - q_y_nm_inv) * dk;
    }
    return acc;
  };

  const std::complex<double> base = integrate(grid.n_k);
  const std::complex<double> refined = integrate(2 * grid.n_k);
  const double scale = std::max(std::abs(refined), 0.01 * std::sqrt(delta / std::sqrt(2.0 * kPi)));
  if (std::abs(base - refined) > grid.tolerance * scale) {
    std::ostringstream os;
    os << "scattering_amplitude: k-grid doubling changed f from (" << base.real() << ", "
       << base.imag() << ") to (" << refined.real() << ", " << refined.imag() << ")";
    throw Error(ErrorCategory::convergence, os.str());
  }
  return refined;
}

}  // namespace sesans
