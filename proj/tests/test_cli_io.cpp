#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sesans/config.hpp"
#include "sesans/constants.hpp"
#include "sesans/errors.hpp"
#include "sesans/models.hpp"
#include "sesans/run.hpp"

using namespace sesans;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sesans_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  return p.string();
}

const char* kMinimalConfig = R"json({
  "grating": {"a_nm": 720, "b_nm": 1280, "depth_nm": 1e4, "sld_per_nm2": 2.06e-4},
  "instrument": {"xi0_nm_per_nm2": 2.05e4, "lambda_band_nm": [0.3, 1.3]},
  "sweep": {"xi_min_nm": 1900, "xi_max_nm": 25100, "n_points": 11601},
  "outputs": ["ideal_tof"]
})json";

std::string read_bytes(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("all presets validate") {
  for (const auto& name : preset_names()) {
    const auto id = parse_preset(name);
    REQUIRE(id.has_value());
    const RunConfig cfg = preset(*id);
    CHECK(check_config(cfg).empty());
    CHECK(!cfg.provenance.empty());
  }
  CHECK(!parse_preset("fig9_nonsense").has_value());
}

TEST_CASE("load_config applies measured-grating defaults") {
  TempDir tmp;
  const auto path = write_file(tmp.path / "ok.json", kMinimalConfig);
  const RunConfig cfg = load_config(path);
  CHECK(cfg.grating.period_nm() == doctest::Approx(2000.0));
  CHECK(cfg.grating.channel_width_nm() == doctest::Approx(560.0));
  CHECK(cfg.grating.depth_nm == doctest::Approx(1e4));
  CHECK(cfg.grating.sld_per_nm2 == doctest::Approx(2.06e-4));
  CHECK(cfg.packet.is_plane_wave());
  CHECK(!cfg.instrument.arm_length_m.has_value());  // optional stays empty
  CHECK(cfg.beam.n_impact_samples == 16);
  CHECK(!cfg.oracle_xi_nm.empty());
}

TEST_CASE("load_config reports every violated invariant at once") {
  TempDir tmp;
  const auto path = write_file(tmp.path / "bad.json", R"json({
    "grating": {"a_nm": 900, "b_nm": 700, "depth_nm": -1, "sld_per_nm2": 2e-4},
    "instrument": {"xi0_nm_per_nm2": 2.05e4, "lambda_band_nm": [0.3, 1.3]},
    "sweep": {"xi_min_nm": 1900, "xi_max_nm": 25100, "n_points": 1},
    "outputs": ["ideal_tof"]
  })json");
  try {
    load_config(path);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::validation);
    const std::string msg = e.what();
    CHECK(msg.find("b_nm > a_nm") != std::string::npos);
    CHECK(msg.find("depth_nm") != std::string::npos);
    CHECK(msg.find("n_points") != std::string::npos);
  }
}

TEST_CASE("load_config reports parse errors with line and column") {
  TempDir tmp;
  const auto path = write_file(tmp.path / "broken.json", "{\n  \"grating\": {,}\n}\n");
  try {
    load_config(path);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::config);
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
}

TEST_CASE("packet accepts the symbolic infinite width") {
  TempDir tmp;
  std::string text = kMinimalConfig;
  text.insert(text.rfind('}'), R"(, "packet": {"delta_nm": "infinite"})");
  const RunConfig cfg = load_config(write_file(tmp.path / "inf.json", text));
  CHECK(cfg.packet.is_plane_wave());
}

TEST_CASE("preset fig2a: ideal peaks return to unity at every order") {
  const RunResult result = run(preset(PresetId::fig2a_ideal));
  REQUIRE(!result.peak_tables.empty());
  const auto& peaks = result.peak_tables.front().peaks;
  REQUIRE(peaks.size() == 12);
  for (const auto& pk : peaks) {
    CHECK(pk.height == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pk.xi_peak_nm == doctest::Approx(2000.0 * pk.order));
  }
}

TEST_CASE("preset fig2b: damped peak heights follow the Gaussian envelope") {
  const RunConfig cfg = preset(PresetId::fig2b_damped);
  const RunResult result = run(cfg);
  const NamedPeaks* damped = nullptr;
  for (const auto& t : result.peak_tables)
    if (t.name == "damped_semiclassical_peaks") damped = &t;
  REQUIRE(damped != nullptr);
  REQUIRE(damped->peaks.size() == 12);
  for (const auto& pk : damped->peaks) {
    const double xi = 2000.0 * pk.order;
    CHECK(pk.height == doctest::Approx(damping(xi, cfg.packet)).epsilon(1e-9));
  }
}

TEST_CASE("tilted preset stretches the period") {
  const RunResult r8 = run(preset(PresetId::fig4_tilted_8deg));
  CHECK(r8.effective_period_nm == doctest::Approx(14370.593068655438).epsilon(1e-10));
}

TEST_CASE("export_csv writes the contracted files deterministically") {
  TempDir tmp;
  const RunConfig cfg = preset(PresetId::fig3a_2MHz);
  const RunResult result = run(cfg);

  const auto dir1 = (tmp.path / "run1").string();
  const auto files1 = export_csv(result, cfg, dir1);
  std::vector<std::string> names;
  for (const auto& f : files1) names.push_back(fs::path(f).filename().string());
  for (const char* expected :
       {"ideal_tof.csv", "background.csv", "resolution_envelope.csv", "smeared.csv"})
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());

  // header contract and provenance comment
  std::ifstream in(dir1 + "/ideal_tof.csv");
  std::string line1, line2;
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(line1.rfind("# preset fig3a_2MHz", 0) == 0);
  CHECK(line2 == "xi_nm,lambda_nm,polarization");

  // byte-identical re-run
  const RunResult again = run(cfg);
  const auto dir2 = (tmp.path / "run2").string();
  const auto files2 = export_csv(again, cfg, dir2);
  REQUIRE(files1.size() == files2.size());
  for (size_t i = 0; i < files1.size(); ++i)
    CHECK(read_bytes(files1[i]) == read_bytes(files2[i]));
}

TEST_CASE("export with no curves fails and creates nothing") {
  TempDir tmp;
  RunResult empty;
  const auto dir = (tmp.path / "never").string();
  CHECK_THROWS_AS(export_csv(empty, preset(PresetId::fig2a_ideal), dir), Error);
  CHECK(!fs::exists(dir + "/ideal_tof.csv"));
}

TEST_CASE("unknown output names are rejected") {
  RunConfig cfg = preset(PresetId::fig2a_ideal);
  cfg.outputs.push_back("polarization_of_the_moon");
  CHECK_THROWS_AS(validate_config(cfg), Error);
}

TEST_CASE("run annotates errors with the failing curve") {
  RunConfig cfg = preset(PresetId::fig2a_ideal);
  cfg.sweep.xi_min_nm = 10.0;  // below the TOF band
  try {
    run(cfg);
    FAIL("expected band error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::band);
    CHECK(std::string(e.what()).find("ideal_tof") != std::string::npos);
  }
}

TEST_CASE("resolution envelope tracks the smeared peak heights") {
  const RunConfig cfg = preset(PresetId::fig3a_2MHz);
  const RunResult result = run(cfg);
  const NamedCurve* env = nullptr;
  const NamedPeaks* peaks = nullptr;
  for (const auto& c : result.curves)
    if (c.name == "resolution_envelope") env = &c;
  for (const auto& t : result.peak_tables)
    if (t.name == "smeared_peaks") peaks = &t;
  REQUIRE(env != nullptr);
  REQUIRE(peaks != nullptr);
  REQUIRE(peaks->peaks.size() == 12);
  for (const auto& pk : peaks->peaks) {
    Eigen::Index idx = 0;
    (env->pattern.xi_nm - pk.xi_peak_nm).abs().minCoeff(&idx);
    CHECK(env->pattern.polarization(idx) == doctest::Approx(pk.height).epsilon(5e-4));
  }
}

TEST_CASE("run computes opt-in oracle curves at the requested points") {
  RunConfig cfg = preset(PresetId::fig2a_ideal);
  cfg.packet = WavePacketSpec::gaussian(5000.0, 2.0 * kPi / 0.7);
  cfg.outputs = {"oracle_semiclassical", "oracle_quantum"};
  cfg.oracle_xi_nm = {560.0};
  const RunResult result = run(cfg);
  REQUIRE(result.curves.size() == 2);

  const PhaseShift phi = tof_phase(cfg.grating, lambda_of_xi(cfg.instrument, 560.0));
  const double pw = plane_wave_polarization(cfg.grating, phi, 560.0);
  const double damped = semiclassical_polarization(cfg.grating, phi, 560.0, cfg.packet);
  for (const auto& curve : result.curves) {
    REQUIRE(curve.pattern.size() == 1);
    CHECK(curve.pattern.xi_nm(0) == 560.0);
    if (curve.name == "oracle_quantum")
      CHECK(curve.pattern.polarization(0) == doctest::Approx(pw).epsilon(5e-3));
    else
      CHECK(curve.pattern.polarization(0) == doctest::Approx(damped).epsilon(5e-3));
  }
}

TEST_CASE("report discrimination number") {
  CHECK(report_discrimination(150000.0, 25000.0) ==
        doctest::Approx(0.9258747122872905).epsilon(1e-12));
}
