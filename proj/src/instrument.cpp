#include "sesans/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sesans/constants.hpp"
#include "sesans/errors.hpp"

namespace sesans {

std::vector<std::string> check_instrument(const InstrumentConfig& inst) {
  std::vector<std::string> v;
  if (!(inst.xi0_nm_per_nm2 > 0.0)) v.push_back("instrument: xi0_nm_per_nm2 must be positive");
  if (!(inst.field_angle_rad > 0.0 && inst.field_angle_rad < kPi / 2.0))
    v.push_back("instrument: field_angle_rad must lie in (0, pi/2)");
  if (!(inst.lambda_min_nm < inst.lambda_max_nm))
    v.push_back("instrument: lambda_min_nm must be below lambda_max_nm");
  if (!(inst.lambda_min_nm > 0.0)) v.push_back("instrument: lambda_min_nm must be positive");
  if (!(inst.tof_bin_nm > 0.0)) v.push_back("instrument: tof_bin_nm must be positive");
  if (inst.arm_length_m && !(*inst.arm_length_m > 0.0))
    v.push_back("instrument: arm_length_m, when given, must be positive");
  return v;
}

std::vector<std::string> check_resolution(const ResolutionParams& res) {
  std::vector<std::string> v;
  if (res.delta_theta_rad < 0.0 || res.delta_J_nm < 0.0 || res.delta_b_nm < 0.0 ||
      res.a_lambda_nm < 0.0 || res.b_lambda < 0.0)
    v.push_back("resolution: all uncertainty parameters must be >= 0");
  return v;
}

double spin_echo_constant(double rf_frequency_hz, double arm_length_m, double theta0_rad) {
  if (!(rf_frequency_hz > 0.0) || !(arm_length_m > 0.0) ||
      !(theta0_rad > 0.0 && theta0_rad < kPi / 2.0)) {
    throw Error(ErrorCategory::validation,
                "spin_echo_constant: requires f > 0, L > 0 and 0 < theta0 < pi/2");
  }
  const double cot = std::cos(theta0_rad) / std::sin(theta0_rad);
  const double xi0_per_m = 2.0 * PhysicalConstants::neutron_mass_kg * rf_frequency_hz *
                           arm_length_m * cot / PhysicalConstants::planck_constant_Js;
  return xi0_per_m * 1e-9;  // 1/m -> nm/nm^2
}

double xi_of_lambda(const InstrumentConfig& inst, double lambda_nm) {
  return inst.xi0_nm_per_nm2 * lambda_nm * lambda_nm;
}

double lambda_of_xi(const InstrumentConfig& inst, double xi_nm) {
  return std::sqrt(xi_nm / inst.xi0_nm_per_nm2);
}

double resolution_sigma(const InstrumentConfig& inst, const ResolutionParams& res,
                        double xi_nm) {
  if (!(xi_nm > 0.0))
    throw Error(ErrorCategory::validation, "resolution_sigma: xi_nm must be positive");
  const double lam2 = xi_nm / inst.xi0_nm_per_nm2;
  const double dlam = res.a_lambda_nm + res.b_lambda * std::sqrt(lam2);
  const double s2t = std::sin(2.0 * inst.field_angle_rad);
  const double t_div = 4.0 * res.delta_theta_rad * res.delta_theta_rad / (s2t * s2t);
  const double t_lam = 4.0 * (dlam * dlam + res.delta_b_nm * res.delta_b_nm) / lam2;
  const double t_J = res.delta_J_nm * res.delta_J_nm / (xi_nm * xi_nm);
  return xi_nm * std::sqrt(t_div + t_lam + t_J);
}

EchoPattern convolve_resolution(const EchoPattern& pattern, const InstrumentConfig& inst,
                                const ResolutionParams& res) {
  const Eigen::Index n = pattern.size();
  EchoPattern out;
  out.xi_nm = pattern.xi_nm;
  out.polarization.resize(n);
  if (res.all_zero()) {
    out.polarization = pattern.polarization;
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x0 = pattern.xi_nm(i);
    const double sigma = resolution_sigma(inst, res, x0);
    if (sigma == 0.0) {
      out.polarization(i) = pattern.polarization(i);
      continue;
    }
    // Grid-fineness precondition near this output point.
    const double spacing =
        (i + 1 < n ? pattern.xi_nm(i + 1) : pattern.xi_nm(i)) -
        (i > 0 ? pattern.xi_nm(i - 1) : pattern.xi_nm(i));
    const double local = spacing / (i > 0 && i + 1 < n ? 2.0 : 1.0);
    if (local > sigma / 4.0) {
      std::ostringstream os;
      os << "convolve_resolution: grid spacing " << local << " nm at xi = " << x0
         << " nm is too coarse; required spacing <= sigma/4 = " << sigma / 4.0 << " nm";
      throw Error(ErrorCategory::grid, os.str());
    }
    const double halfwidth = 6.0 * sigma;
    // Locate the +-6 sigma window.
    const double* xs = pattern.xi_nm.data();
    const Eigen::Index lo =
        std::lower_bound(xs, xs + n, x0 - halfwidth) - xs;
    const Eigen::Index hi =
        std::upper_bound(xs, xs + n, x0 + halfwidth) - xs;
    double acc = 0.0, wsum = 0.0;
    for (Eigen::Index j = lo; j < hi; ++j) {
      const double u = (pattern.xi_nm(j) - x0) / sigma;
      const double w = std::exp(-0.5 * u * u);
      acc += w * pattern.polarization(j);
      wsum += w;
    }
    out.polarization(i) = acc / wsum;
  }
  return out;
}

PiecewiseLinear::PiecewiseLinear(Eigen::ArrayXd x, Eigen::ArrayXd y)
    : x_(std::move(x)), y_(std::move(y)) {}

double PiecewiseLinear::operator()(double x) const {
  const Eigen::Index n = x_.size();
  if (n == 0) return 0.0;
  if (x <= x_(0)) return y_(0);
  if (x >= x_(n - 1)) return y_(n - 1);
  const double* b = x_.data();
  const Eigen::Index j = std::upper_bound(b, b + n, x) - b;  // x_(j-1) <= x < x_(j)
  const double t = (x - x_(j - 1)) / (x_(j) - x_(j - 1));
  return y_(j - 1) + t * (y_(j) - y_(j - 1));
}

namespace {

struct WindowMax {
  int order;
  Eigen::Index idx;
};

// Index of the sample maximum inside each window [n p - p/2, n p + p/2] whose
// center n p falls in the pattern span.
std::vector<WindowMax> window_maxima(const EchoPattern& pat, double period_nm,
                                     std::vector<std::string>* warnings) {
  std::vector<WindowMax> out;
  const double lo = pat.xi_nm(0), hi = pat.xi_nm(pat.size() - 1);
  const int n_lo = static_cast<int>(std::ceil(lo / period_nm));
  const int n_hi = static_cast<int>(std::floor(hi / period_nm));
  const double* xs = pat.xi_nm.data();
  for (int n = std::max(1, n_lo); n <= n_hi; ++n) {
    const double c = n * period_nm;
    Eigen::Index a = std::lower_bound(xs, xs + pat.size(), c - period_nm / 2.0) - xs;
    Eigen::Index b = std::upper_bound(xs, xs + pat.size(), c + period_nm / 2.0) - xs;
    if (b - a < 3) {
      if (warnings) {
        std::ostringstream os;
        os << "find_peaks: window around order " << n << " has fewer than 3 samples; skipped";
        warnings->push_back(os.str());
      }
      continue;
    }
    Eigen::Index best = a;
    for (Eigen::Index j = a + 1; j < b; ++j)
      if (pat.polarization(j) > pat.polarization(best)) best = j;
    out.push_back({n, best});
  }
  return out;
}

}  // namespace

PiecewiseLinear fit_background(const EchoPattern& pattern, double period_nm) {
  if (pattern.size() < 2 ||
      pattern.xi_nm(pattern.size() - 1) - pattern.xi_nm(0) < 2.0 * period_nm)
    throw Error(ErrorCategory::validation,
                "fit_background: pattern must span at least two periods");
  const auto peaks = window_maxima(pattern, period_nm, nullptr);
  std::vector<double> mx, my;
  for (size_t k = 0; k + 1 < peaks.size(); ++k) {
    Eigen::Index i0 = peaks[k].idx, i1 = peaks[k + 1].idx;
    Eigen::Index best = i0;
    for (Eigen::Index j = i0; j <= i1; ++j)
      if (pattern.polarization(j) < pattern.polarization(best)) best = j;
    mx.push_back(pattern.xi_nm(best));
    my.push_back(pattern.polarization(best));
  }
  if (mx.size() < 2)
    throw Error(ErrorCategory::validation,
                "fit_background: fewer than 2 local minima between peaks");
  Eigen::ArrayXd x = Eigen::Map<Eigen::ArrayXd>(mx.data(), static_cast<Eigen::Index>(mx.size()));
  Eigen::ArrayXd y = Eigen::Map<Eigen::ArrayXd>(my.data(), static_cast<Eigen::Index>(my.size()));
  return PiecewiseLinear(std::move(x), std::move(y));
}

namespace {

// Linear-interpolated crossing of `level` while scanning away from the peak.
double half_level_crossing(const EchoPattern& pat, Eigen::Index peak, int dir, double level,
                           Eigen::Index lo, Eigen::Index hi) {
  Eigen::Index j = peak;
  while (true) {
    const Eigen::Index k = j + dir;
    if (k < lo || k >= hi) return pat.xi_nm(j);  // ran off the window
    if (pat.polarization(k) <= level) {
      const double y0 = pat.polarization(j), y1 = pat.polarization(k);
      const double t = (y0 - level) / (y0 - y1);
      return pat.xi_nm(j) + t * (pat.xi_nm(k) - pat.xi_nm(j));
    }
    j = k;
  }
}

}  // namespace

FindPeaksResult find_peaks(const EchoPattern& pattern, double period_nm) {
  if (pattern.size() < 2 ||
      pattern.xi_nm(pattern.size() - 1) - pattern.xi_nm(0) < period_nm)
    throw Error(ErrorCategory::validation, "find_peaks: pattern must span at least one period");
  FindPeaksResult out;
  const auto maxima = window_maxima(pattern, period_nm, &out.warnings);

  // Baseline: interpolated inter-peak minima when available, else window minimum.
  PiecewiseLinear bg;
  bool have_bg = false;
  if (maxima.size() >= 3) {
    try {
      bg = fit_background(pattern, period_nm);
      have_bg = true;
    } catch (const Error&) {
    }
  }

  const double* xs = pattern.xi_nm.data();
  for (const auto& wm : maxima) {
    const double c = wm.order * period_nm;
    Eigen::Index a = std::lower_bound(xs, xs + pattern.size(), c - period_nm / 2.0) - xs;
    Eigen::Index b = std::upper_bound(xs, xs + pattern.size(), c + period_nm / 2.0) - xs;
    PeakEstimate pe;
    pe.order = wm.order;
    pe.xi_peak_nm = pattern.xi_nm(wm.idx);
    pe.height = pattern.polarization(wm.idx);
    double base;
    if (have_bg) {
      base = bg(pe.xi_peak_nm);
    } else {
      Eigen::Index worst = a;
      for (Eigen::Index j = a; j < b; ++j)
        if (pattern.polarization(j) < pattern.polarization(worst)) worst = j;
      base = pattern.polarization(worst);
    }
    const double level = base + 0.5 * (pe.height - base);
    const double xl = half_level_crossing(pattern, wm.idx, -1, level, a, b);
    const double xr = half_level_crossing(pattern, wm.idx, +1, level, a, b);
    pe.width_nm = xr - xl;
    out.peaks.push_back(pe);
  }
  return out;
}

EchoPattern detrend(const EchoPattern& pattern, const PiecewiseLinear& bg) {
  EchoPattern out;
  out.xi_nm = pattern.xi_nm;
  out.polarization.resize(pattern.size());
  for (Eigen::Index i = 0; i < pattern.size(); ++i) {
    const double b = bg(pattern.xi_nm(i));
    const double denom = 1.0 - b;
    out.polarization(i) =
        std::abs(denom) < 1e-12 ? 1.0 : (pattern.polarization(i) - b) / denom;
  }
  return out;
}

}  // namespace sesans
