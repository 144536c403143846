#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sesans/constants.hpp"
#include "sesans/errors.hpp"
#include "sesans/models.hpp"
#include "sesans/oracle.hpp"

using namespace sesans;

namespace {

GratingSpec measured_grating() { return {720.0, 1280.0, 1.0e4, 2.06e-4, 512}; }

// Stratified beam: 49 periods wide so 16 impact samples cover the grating
// phase uniformly.
BeamProfile beam() { return {98000.0, 16}; }

WavePacketSpec packet(double delta) { return WavePacketSpec::gaussian(delta, 2.0 * kPi / 0.7); }

}  // namespace

TEST_CASE("entangled state norm and sigma_y identity") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uq(-30.0, 30.0);
  for (int i = 0; i < 100; ++i) {
    const double q1 = uq(rng), q2 = uq(rng);
    const Spinor s1 = entangled_state(q1);
    const Spinor s2 = entangled_state(q2);
    CHECK(std::abs(s1.norm() - 1.0) < 1e-12);
    const auto m = sigma_y_expectation(s1, s2);
    CHECK(std::abs(m.real() - std::cos(0.5 * (q1 + q2))) < 1e-12);
    CHECK(std::abs(m.imag()) < 1e-12);
  }
  CHECK(sigma_y_expectation(entangled_state(0.0), entangled_state(0.0)).real() ==
        doctest::Approx(1.0).epsilon(1e-14));
  // vector form: k.xi over (y, z) components
  const Spinor v = entangled_state({2.0, 3.0}, {0.5, 0.0});
  const Spinor s = entangled_state(1.0);
  CHECK(std::abs(v.up_x - s.up_x) < 1e-15);
  CHECK(std::abs(v.down_x - s.down_x) < 1e-15);
}

TEST_CASE("dispersion is quadratic") {
  CHECK(dispersion(0.0) == 0.0);
  const double w1 = dispersion(3.7);
  CHECK(dispersion(7.4) == doctest::Approx(4.0 * w1).epsilon(1e-14));
  // k0z for lambda = 0.5 nm
  CHECK(dispersion(2.0 * kPi / 0.5) == doctest::Approx(4.9712e12).epsilon(1e-3));
}

TEST_CASE("scattering amplitude") {
  const GratingSpec g = measured_grating();
  const auto pk = packet(5000.0);

  SUBCASE("transparent grating: |f|^2 integrates to the packet total") {
    const double qmax = 0.004;
    const int nq = 1601;
    const double dq = 2.0 * qmax / (nq - 1);
    double total = 0.0;
    for (int i = 0; i < nq; ++i) {
      const double q = -qmax + i * dq;
      total += std::norm(scattering_amplitude(pk, g, PhaseShift{0.0}, 300.0, q)) * dq;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
  }

  SUBCASE("grating-order peaks carry |c_n|^2 relative weights") {
    const PhaseShift phi{kPi};
    const double f0 = std::norm(scattering_amplitude(pk, g, phi, 0.0, 0.0));
    for (long n : {1L, 2L, 3L}) {
      const double q = 2.0 * kPi * static_cast<double>(n) / g.period_nm();
      const double fn = std::norm(scattering_amplitude(pk, g, phi, 0.0, q));
      const double expected =
          std::norm(fourier_coefficient(g, phi, n)) / std::norm(fourier_coefficient(g, phi, 0));
      CHECK(fn / f0 == doctest::Approx(expected).epsilon(0.05));
    }
  }

  SUBCASE("shifting the impact parameter by one period preserves |f|") {
    const PhaseShift phi{2.0};
    for (double q : {0.0, 0.0031415926535, 0.01}) {
      const auto f1 = scattering_amplitude(pk, g, phi, 137.0, q);
      const auto f2 = scattering_amplitude(pk, g, phi, 137.0 + g.period_nm(), q);
      CHECK(std::abs(std::abs(f1) - std::abs(f2)) < 1e-9 * std::max(1.0, std::abs(f1)));
    }
  }

  SUBCASE("plane-wave packets are rejected") {
    CHECK_THROWS_AS(
        scattering_amplitude(WavePacketSpec::plane_wave(), g, PhaseShift{1.0}, 0.0, 0.0),
        Error);
  }
}

TEST_CASE("quantum oracle reproduces the plane-wave curve at every packet width") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  for (double delta : {2000.0, 5000.0}) {
    for (double xi : {280.0, 1000.0}) {
      const double q = quantum_polarization_numeric(packet(delta), g, beam(), xi, phi);
      CHECK(q == doctest::Approx(plane_wave_polarization(g, phi, xi)).epsilon(5e-3));
    }
  }
  // full-period echo
  const double q = quantum_polarization_numeric(packet(5000.0), g, beam(), 2000.0, phi);
  CHECK(q == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("quantum oracle is transparent at zero phase") {
  const GratingSpec g = measured_grating();
  for (double xi : {140.0, 560.0}) {
    const double q = quantum_polarization_numeric(packet(5000.0), g, beam(), xi, PhaseShift{0.0});
    CHECK(q == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("momentum route reproduces the reduced real-space identity") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  for (double xi : {280.0, 560.0}) {
    const double k_route = quantum_polarization_numeric(packet(5000.0), g, beam(), xi, phi);
    const double y_route = quantum_reduced_identity(packet(5000.0), g, beam(), xi, phi);
    CHECK(k_route == doctest::Approx(y_route).epsilon(1e-6));
  }
}

TEST_CASE("polarization does not depend on the evolution time") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  const double p0 =
      quantum_polarization_numeric(packet(5000.0), g, beam(), 280.0, phi, {}, nullptr, 0.0);
  const double pt =
      quantum_polarization_numeric(packet(5000.0), g, beam(), 280.0, phi, {}, nullptr, 1e-5);
  CHECK(pt == doctest::Approx(p0).epsilon(5e-3));
}

TEST_CASE("semiclassical oracle recovers the damped product form") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  SUBCASE("reference point: 5 um packet at xi = 560 nm") {
    const double s = semiclassical_polarization_numeric(packet(5000.0), g, beam(), phi, 560.0);
    CHECK(s == doctest::Approx(-0.11924971535221096).epsilon(5e-3));
  }
  SUBCASE("zero separation gives unity") {
    const double s = semiclassical_polarization_numeric(packet(5000.0), g, beam(), phi, 0.0);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("damping envelope at the echo orders, 60 um packet") {
    const auto pk = packet(60000.0);
    SemiclassicalOracle oracle(pk, g, phi, beam(), 24000.0);
    for (int n : {1, 6, 12}) {
      const double xi = 2000.0 * n;
      CHECK(oracle.evaluate(xi) == doctest::Approx(damping(xi, pk)).epsilon(1e-2));
    }
  }
}

TEST_CASE("unentangled control matches the single-path model") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  SUBCASE("reference point") {
    const double c = unentangled_control(packet(5000.0), g, beam(), 560.0, phi);
    CHECK(c == doctest::Approx(-0.11924971535221096).epsilon(5e-3));
  }
  SUBCASE("zero separation") {
    CHECK(unentangled_control(packet(5000.0), g, beam(), 0.0, phi) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("wide packets approach the plane-wave result") {
    GratingSpec big = g;
    big.n_periods = 2048;
    const double c = unentangled_control(packet(200000.0), big, beam(), 560.0, phi);
    CHECK(std::abs(c - plane_wave_polarization(g, phi, 560.0)) < 1e-4);
  }
  SUBCASE("cross-oracle agreement with the semiclassical route") {
    const double c = unentangled_control(packet(5000.0), g, beam(), 560.0, phi);
    const double s = semiclassical_polarization_numeric(packet(5000.0), g, beam(), phi, 560.0);
    CHECK(c == doctest::Approx(s).epsilon(5e-3));
  }
}

TEST_CASE("entangled and control oracles separate where damping bites") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  const double xi = g.xi_tilde_min_nm();  // 560 nm
  const auto pk = packet(5000.0);
  const double q = quantum_polarization_numeric(pk, g, beam(), xi, phi);
  const double c = unentangled_control(pk, g, beam(), xi, phi);
  const double pw = plane_wave_polarization(g, phi, xi);
  const double floor = (1.0 - damping(xi, pk)) * std::abs(pw) / 2.0;
  CHECK(std::abs(q - c) >= floor);
}

TEST_CASE("packet norm is conserved through the grating") {
  const GratingSpec g = measured_grating();
  for (double phi : {0.0, kPi / 3.0, kPi}) {
    const double norm = packet_norm_numeric(packet(5000.0), g, PhaseShift{phi}, beam());
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("oracle preconditions") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};

  SUBCASE("plane-wave packets are rejected") {
    CHECK_THROWS_AS(
        quantum_polarization_numeric(WavePacketSpec::plane_wave(), g, beam(), 100.0, phi),
        Error);
  }
  SUBCASE("slow packets break the forward approximation") {
    auto pk = packet(5000.0);
    pk.k0_nm_inv[2] = 1e-3;
    CHECK_THROWS_AS(quantum_polarization_numeric(pk, g, beam(), 100.0, phi), Error);
  }
  SUBCASE("packet must fit inside the grating aperture") {
    GratingSpec tiny = g;
    tiny.n_periods = 8;
    try {
      quantum_polarization_numeric(packet(5000.0), tiny, beam(), 100.0, phi);
      FAIL("expected aperture error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::validation);
      CHECK(std::string(e.what()).find("n_periods") != std::string::npos);
    }
  }
  SUBCASE("narrow beams are flagged") {
    std::vector<std::string> warnings;
    quantum_polarization_numeric(packet(5000.0), g, {4000.0, 16}, 280.0, phi, {}, &warnings);
    REQUIRE(!warnings.empty());
    CHECK(warnings.front().find("beam width") != std::string::npos);
  }
  SUBCASE("convergence failure raises instead of returning") {
    // unstratified beam + coarse mesh: refinement visibly moves the result,
    // so an absurdly tight tolerance must throw
    QuadratureGrid grid;
    grid.dy_target_nm = 120.0;
    grid.tolerance = 1e-12;
    CHECK_THROWS_AS(
        quantum_polarization_numeric(packet(2000.0), g, {83000.0, 16}, 1000.0, PhaseShift{kPi},
                                     grid),
        Error);
  }
}

TEST_CASE("doubling the aperture leaves converged results unchanged") {
  // the packet support must already sit inside the aperture, so edge effects
  // vanish and a larger grating changes nothing
  GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  const double q512 = quantum_polarization_numeric(packet(5000.0), g, beam(), 280.0, phi);
  g.n_periods = 1024;
  const double q1024 = quantum_polarization_numeric(packet(5000.0), g, beam(), 280.0, phi);
  CHECK(q512 == q1024);
}

TEST_CASE("beam width insensitivity") {
  const GratingSpec g = measured_grating();
  const PhaseShift phi{kPi};
  const double ref = quantum_polarization_numeric(packet(5000.0), g, beam(), 280.0, phi);
  const double other =
      quantum_polarization_numeric(packet(5000.0), g, {76000.0, 19}, 280.0, phi);
  CHECK(other == doctest::Approx(ref).epsilon(5e-3));
}
