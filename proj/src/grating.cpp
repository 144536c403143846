#include "sesans/grating.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sesans/constants.hpp"
#include "sesans/errors.hpp"

namespace sesans {

double GratingSpec::xi_tilde_min_nm() const {
  return std::min(wall_width_nm(), channel_width_nm());
}

double GratingSpec::xi_tilde_max_nm() const {
  return std::max(wall_width_nm(), channel_width_nm());
}

std::vector<std::string> check_grating(const GratingSpec& g) {
  std::vector<std::string> v;
  if (!(g.a_nm >= 0.0)) v.push_back("grating: a_nm must satisfy a_nm >= 0");
  if (!(g.b_nm > g.a_nm)) v.push_back("grating: geometry requires b_nm > a_nm >= 0");
  if (!(g.period_nm() > 0.0)) v.push_back("grating: period a_nm + b_nm must be positive");
  if (!(g.depth_nm > 0.0)) v.push_back("grating: depth_nm must be positive");
  if (!(g.sld_per_nm2 > 0.0)) v.push_back("grating: sld_per_nm2 must be positive");
  if (g.n_periods < 1) v.push_back("grating: n_periods must be >= 1");
  return v;
}

void validate_grating(const GratingSpec& g) {
  auto v = check_grating(g);
  if (v.empty()) return;
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i];
  throw Error(ErrorCategory::validation, os.str());
}

namespace {

// Reduce y into (-a, b]. frac == 0 corresponds to y = b (mod p), a channel point.
inline double reduce_to_cell(double y, double a, double p) {
  double u = (y + a) / p;
  double frac = u - std::floor(u);
  if (frac == 0.0) return p - a;  // exactly b
  return frac * p - a;
}

}  // namespace

std::complex<double> transmission(const GratingSpec& g, PhaseShift phi, double y_nm) {
  const double a = g.a_nm, p = g.period_nm();
  const double y = reduce_to_cell(y_nm, a, p);
  if (y <= a) return std::polar(1.0, phi.rad);
  return {1.0, 0.0};
}

namespace {

// Re[T*(y) T(y+s)] is piecewise constant; its jumps in one period sit at the
// wall edges of both factors.
std::vector<double> product_breakpoints(const GratingSpec& g, double shift, double lo,
                                        double hi) {
  const double a = g.a_nm, p = g.period_nm();
  std::vector<double> pts{lo, hi};
  const double edges[4] = {-a, a, -a - shift, a - shift};
  for (double e : edges) {
    double first = e + p * std::ceil((lo - e) / p);
    for (double x = first; x < hi; x += p) {
      if (x > lo && x < hi) pts.push_back(x);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double x, double y) { return std::abs(x - y) < 1e-12 * p; }),
            pts.end());
  return pts;
}

// Walks uniformly spaced sample points through the periodic cell without a
// division per point; frac tracks frac((y + a)/p) and the wall test is
// frac in (0, 2a/p].
struct CellWalker {
  double frac, step, wall_frac;
  CellWalker(double y_first, double h, double a, double p)
      : step(h / p), wall_frac(2.0 * a / p) {
    const double u = (y_first + a) / p;
    frac = u - std::floor(u);
  }
  bool in_wall() const { return frac > 0.0 && frac <= wall_frac; }
  void advance() {
    frac += step;
    if (frac >= 1.0) frac -= 1.0;
  }
};

double integrate_product(const GratingSpec& g, PhaseShift phi, double shift,
                         const std::vector<double>& pts, long n_points) {
  const double total = pts.back() - pts.front();
  const double a = g.a_nm, p = g.period_nm();
  const double cosphi = std::cos(phi.rad);
  double sum = 0.0;
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const double l = pts[k], r = pts[k + 1];
    const long n = std::max<long>(1, std::lround(n_points * (r - l) / total));
    const double h = (r - l) / static_cast<double>(n);
    // Re[T*(y) T(y+s)] is 1 when both points sit in the same region and
    // cos(phi) when exactly one of them crosses a wall.
    CellWalker wa(l + 0.5 * h, h, a, p);
    CellWalker wb(l + 0.5 * h + shift, h, a, p);
    double piece = 0.0;
    for (long j = 0; j < n; ++j) {
      piece += (wa.in_wall() != wb.in_wall()) ? cosphi : 1.0;
      wa.advance();
      wb.advance();
    }
    sum += piece * h;
  }
  return sum;
}

}  // namespace

double autocorrelation(const GratingSpec& g, PhaseShift phi, double shift_nm, long n_points,
                       double rel_tol) {
  const double p = g.period_nm();
  const double shift = shift_nm - p * std::floor(shift_nm / p);
  const auto pts = product_breakpoints(g, shift, -p / 2.0, p / 2.0);
  const double coarse = integrate_product(g, phi, shift, pts, n_points) / p;
  const double fine = integrate_product(g, phi, shift, pts, 2 * n_points) / p;
  const double est = std::abs(fine - coarse) / std::max(1.0, std::abs(fine));
  if (est > rel_tol) {
    std::ostringstream os;
    os << "autocorrelation quadrature did not converge: relative change " << est
       << " after doubling exceeds " << rel_tol;
    throw Error(ErrorCategory::convergence, os.str());
  }
  return fine;
}

std::complex<double> fourier_coefficient(const GratingSpec& g, PhaseShift phi, long n) {
  const double a = g.a_nm, p = g.period_nm();
  const std::complex<double> w = std::polar(1.0, phi.rad) - 1.0;
  if (n == 0) return 1.0 + w * (2.0 * a / p);
  const double x = 2.0 * kPi * static_cast<double>(n) * a / p;
  return w * std::sin(x) / (kPi * static_cast<double>(n));
}

GratingSpec effective_grating(const GratingSpec& g, double tilt_rad) {
  if (!(tilt_rad > 0.0) || tilt_rad > kPi / 2.0 + 1e-12) {
    throw Error(ErrorCategory::validation,
                "effective_grating: tilt must lie in (0, pi/2]; tilt = 0 gives an "
                "infinite effective period");
  }
  const double f = 1.0 / std::sin(tilt_rad);
  GratingSpec out = g;
  out.a_nm = g.a_nm * f;
  out.b_nm = g.b_nm * f;
  return out;
}

}  // namespace sesans
