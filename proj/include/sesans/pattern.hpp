#pragma once

#include <Eigen/Dense>

namespace sesans {

/// Sampled curve of normalized echo polarization versus spin echo length.
/// xi_nm is strictly increasing; polarization stays in [-1, 1].
struct EchoPattern {
  Eigen::ArrayXd xi_nm;
  Eigen::ArrayXd polarization;

  Eigen::Index size() const { return xi_nm.size(); }
};

/// Uniform grid helper: n points from lo to hi inclusive.
inline Eigen::ArrayXd linspace(double lo, double hi, Eigen::Index n) {
  return Eigen::ArrayXd::LinSpaced(n, lo, hi);
}

}  // namespace sesans
