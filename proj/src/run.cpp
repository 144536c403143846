#include "sesans/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sesans/constants.hpp"
#include "sesans/errors.hpp"
#include "sesans/oracle.hpp"

namespace sesans {

namespace {

// Expected smeared height of an echo peak sitting at xi: the local apex
// profile 1 - (2(1-cos phi)/p) min(|u|, xi_min) folded with the Gaussian
// resolution, E[min(|U|, m)] in closed form.
double envelope_at(const GratingSpec& g, const InstrumentConfig& inst,
                   const ResolutionParams& res, double xi) {
  const double p = g.period_nm();
  const double phi = g.sld_per_nm2 * g.depth_nm * lambda_of_xi(inst, xi);
  const double slope_factor = 2.0 * (1.0 - std::cos(phi)) / p;
  if (res.all_zero()) return 1.0;
  const double sigma = resolution_sigma(inst, res, xi);
  if (sigma == 0.0) return 1.0;
  const double m = g.xi_tilde_min_nm();
  const double expected_absu =
      sigma * std::sqrt(2.0 / kPi) * (1.0 - std::exp(-m * m / (2.0 * sigma * sigma))) +
      m * std::erfc(m / (sigma * std::sqrt(2.0)));
  return 1.0 - slope_factor * expected_absu;
}

EchoPattern oracle_curve(const RunConfig& cfg, const GratingSpec& geff, bool quantum,
                         std::vector<std::string>* warnings) {
  std::vector<double> xs = cfg.oracle_xi_nm;
  std::sort(xs.begin(), xs.end());
  if (xs.empty())
    throw Error(ErrorCategory::validation,
                "oracle curves need oracle_xi_nm sample points within the sweep");
  EchoPattern pat;
  pat.xi_nm.resize(static_cast<Eigen::Index>(xs.size()));
  pat.polarization.resize(static_cast<Eigen::Index>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    const double xi = xs[i];
    const PhaseShift phi = tof_phase(geff, lambda_of_xi(cfg.instrument, xi));
    pat.xi_nm(static_cast<Eigen::Index>(i)) = xi;
    pat.polarization(static_cast<Eigen::Index>(i)) =
        quantum ? quantum_polarization_numeric(cfg.packet, geff, cfg.beam, xi, phi,
                                               cfg.oracle_grid, warnings)
                : semiclassical_polarization_numeric(cfg.packet, geff, cfg.beam, phi, xi,
                                                     cfg.oracle_grid, warnings);
  }
  return pat;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  validate_config(cfg);
  RunResult result;
  result.provenance = cfg.provenance;
  const GratingSpec geff =
      cfg.tilt_rad ? effective_grating(cfg.grating, *cfg.tilt_rad) : cfg.grating;
  result.effective_period_nm = geff.period_nm();

  const Eigen::ArrayXd grid =
      linspace(cfg.sweep.xi_min_nm, cfg.sweep.xi_max_nm, cfg.sweep.n_points);

  EchoPattern ideal;  // shared by several curves
  bool have_ideal = false;
  auto ensure_ideal = [&]() {
    if (!have_ideal) {
      ideal = tof_pattern(geff, cfg.instrument, grid);
      have_ideal = true;
    }
  };

  for (const auto& name : cfg.outputs) {
    try {
      if (name == "ideal_tof") {
        ensure_ideal();
        result.curves.push_back({name, ideal});
      } else if (name == "damped_semiclassical") {
        ensure_ideal();
        EchoPattern damped;
        damped.xi_nm = grid;
        damped.polarization.resize(grid.size());
        for (Eigen::Index i = 0; i < grid.size(); ++i)
          damped.polarization(i) = damping(grid(i), cfg.packet) * ideal.polarization(i);
        result.curves.push_back({name, damped});
      } else if (name == "smeared") {
        ensure_ideal();
        result.curves.push_back(
            {name, convolve_resolution(ideal, cfg.instrument, cfg.resolution)});
      } else if (name == "background") {
        EchoPattern bg;
        bg.xi_nm = grid;
        bg.polarization.resize(grid.size());
        for (Eigen::Index i = 0; i < grid.size(); ++i)
          bg.polarization(i) = background(geff, cfg.instrument, grid(i));
        result.curves.push_back({name, bg});
      } else if (name == "resolution_envelope") {
        EchoPattern env;
        env.xi_nm = grid;
        env.polarization.resize(grid.size());
        for (Eigen::Index i = 0; i < grid.size(); ++i)
          env.polarization(i) = envelope_at(geff, cfg.instrument, cfg.resolution, grid(i));
        result.curves.push_back({name, env});
      } else if (name == "oracle_quantum") {
        result.curves.push_back(
            {name, oracle_curve(cfg, geff, /*quantum=*/true, &result.warnings)});
      } else if (name == "oracle_semiclassical") {
        result.curves.push_back(
            {name, oracle_curve(cfg, geff, /*quantum=*/false, &result.warnings)});
      }
    } catch (const Error& e) {
      throw Error(e.category(), "while computing curve '" + name + "': " + e.what());
    }
  }

  for (const auto& curve : result.curves) {
    if (curve.name != "ideal_tof" && curve.name != "smeared" &&
        curve.name != "damped_semiclassical")
      continue;
    const double span = curve.pattern.xi_nm(curve.pattern.size() - 1) - curve.pattern.xi_nm(0);
    if (span < result.effective_period_nm) continue;
    auto found = find_peaks(curve.pattern, result.effective_period_nm);
    result.warnings.insert(result.warnings.end(), found.warnings.begin(),
                           found.warnings.end());
    result.peak_tables.push_back({curve.name + "_peaks", std::move(found.peaks)});
  }
  return result;
}

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::vector<std::string> export_csv(const RunResult& result, const RunConfig& cfg,
                                    const std::string& dir) {
  if (result.curves.empty())
    throw Error(ErrorCategory::validation, "export_csv: no curves to export");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::io, "export_csv: cannot create directory " + dir);

  std::vector<std::string> written;
  for (const auto& curve : result.curves) {
    const std::string path = dir + "/" + curve.name + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::io, "export_csv: cannot write " + path);
    out << "# " << result.provenance << "\n";
    out << "xi_nm,lambda_nm,polarization\n";
    for (Eigen::Index i = 0; i < curve.pattern.size(); ++i) {
      const double xi = curve.pattern.xi_nm(i);
      out << fmt12(xi) << ',' << fmt12(lambda_of_xi(cfg.instrument, xi)) << ','
          << fmt12(curve.pattern.polarization(i)) << "\n";
    }
    written.push_back(path);
  }
  for (const auto& table : result.peak_tables) {
    const std::string path = dir + "/" + table.name + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::io, "export_csv: cannot write " + path);
    out << "# " << result.provenance << "\n";
    out << "order,xi_peak_nm,height,width_nm\n";
    for (const auto& pk : table.peaks) {
      out << pk.order << ',' << fmt12(pk.xi_peak_nm) << ',' << fmt12(pk.height) << ','
          << fmt12(pk.width_nm) << "\n";
    }
    written.push_back(path);
  }
  return written;
}

double report_discrimination(double fwhm_nm, double xi_nm) {
  const double delta = fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double r = xi_nm / delta;
  return std::exp(-0.5 * r * r);
}

}  // namespace sesans
