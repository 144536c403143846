#pragma once

namespace sesans {

/// CODATA 2018 values used by the spin-echo kinematics.
struct PhysicalConstants {
  static constexpr double neutron_mass_kg = 1.67492749804e-27;
  static constexpr double planck_constant_Js = 6.62607015e-34;
  static constexpr double hbar_Js = 1.054571817e-34;
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace sesans
