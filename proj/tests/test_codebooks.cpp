#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "fdbeam/codebooks.hpp"
#include "json.hpp"
#include "fdbeam/metrics.hpp"
#include "oracles.hpp"

using namespace fdbeam;

namespace {

const ArrayGeometry kUpa{8, 8, 0.5, Eigen::Vector3d::Zero()};
const QuantizationSpec kExact = QuantizationSpec::unquantized_phase();
const QuantizationSpec kFive{5, 5, 0.25, AmpMode::log};
// Fine enough in phase and amplitude to stand in for unquantized tapers.
const QuantizationSpec kFine{20, 20, 0.25, AmpMode::linear};

// Reference 8-point tapers (scipy.signal.windows.taylor, nbar=4, norm=True).
const double kTaylor20[4] = {0.5948622884820137, 0.6622232273254699, 0.8671466770542929, 0.9893142831868982};
const double kTaylor40[4] = {0.15974597053908882, 0.4172563136470604, 0.7422802755368356, 0.9674848176382057};

double gain(const CVec& a, const CVec& f) { return std::norm(a.dot(f)); }

// -3 dB width in degrees of an azimuth cut at zero elevation.
double beamwidth_deg(const CVec& beam) {
  const auto cut = pattern_cut(beam, kUpa, CutAxis::azimuth, 0.0, 0.0, deg2rad(40.0), 40001);
  const double peak = cut.gains[0];
  for (Eigen::Index k = 0; k < cut.gains.size(); ++k)
    if (cut.gains[k] < 0.5 * peak) return 2.0 * rad2deg(cut.angles[k]);
  return 80.0;
}

}  // namespace

TEST_SUITE("codebooks") {
  TEST_CASE("cbf peak gain") {
    const auto dirs = coverage_grid(DirectionGrid::default_region());
    const auto exact = cbf(kUpa, dirs, kExact);
    const auto quant = cbf(kUpa, dirs, kFive);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const CVec a = oracle::steering(8, 8, 0.5, dirs[i].azimuth, dirs[i].elevation);
      CHECK(gain(a, realize(exact.beams[i])) == doctest::Approx(4096.0).epsilon(1e-12));
      CHECK(10.0 * std::log10(4096.0 / gain(a, realize(quant.beams[i]))) <= 0.1);
    }
    const auto broadside = cbf(kUpa, {Direction{}}, kFive);
    for (const auto& w : broadside.beams[0].weights) CHECK(w == QuantizedWeight{0, 0});
  }

  TEST_CASE("cbf self-gain dominance") {
    const auto dirs = coverage_grid(DirectionGrid::default_region());
    const auto cb = cbf(kUpa, dirs, kFive);
    const CMat f = to_matrix(cb);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const CVec a = array_response(kUpa, dirs[i]);
      const double own = gain(a, f.col(static_cast<Eigen::Index>(i)));
      for (Eigen::Index k = 0; k < f.cols(); ++k) CHECK(own >= gain(a, f.col(k)));
    }
  }

  TEST_CASE("taylor taper matches reference values") {
    const RVec t20 = taylor_window_1d(8, {20.0, 4, WindowLayout::azimuth});
    const RVec t40 = taylor_window_1d(8, {40.0, 4, WindowLayout::azimuth});
    for (int k = 0; k < 4; ++k) {
      CHECK(t20[k] == doctest::Approx(kTaylor20[k] / kTaylor20[3]).epsilon(1e-12));
      CHECK(t40[k] == doctest::Approx(kTaylor40[k] / kTaylor40[3]).epsilon(1e-12));
      CHECK(t20[k] == t20[7 - k]);
      CHECK(t40[k] == t40[7 - k]);
    }
    CHECK(t40.maxCoeff() == 1.0);
    CHECK(oracle::peak_sidelobe_db(t40) <= -35.0);
  }

  TEST_CASE("taylor at the uniform sidelobe level") {
    // With one term the taper is flat; with more terms the requested level is too shallow.
    const RVec flat = taylor_window_1d(8, {13.26, 1, WindowLayout::azimuth});
    CHECK((flat.array() - 1.0).abs().maxCoeff() <= 0.05);
    CHECK_THROWS_AS(taylor_window_1d(8, {13.26, 4, WindowLayout::azimuth}), Error);
    CHECK_THROWS_AS(taylor_window_1d(3, {20.0, 4, WindowLayout::azimuth}), Error);
  }

  TEST_CASE("array window layouts") {
    const WindowSpec w{20.0, 4, WindowLayout::azimuth};
    const RVec t = taylor_window_1d(8, w);
    const RVec az = array_window(kUpa, w);
    for (int c = 0; c < 8; ++c)
      for (int r = 0; r < 8; ++r) CHECK(az[c * 8 + r] == t[c]);
    const RVec sep = array_window(kUpa, {20.0, 4, WindowLayout::separable});
    for (int c = 0; c < 8; ++c)
      for (int r = 0; r < 8; ++r) CHECK(sep[c * 8 + r] == doctest::Approx(t[c] * t[r]));
    const WindowSpec wv{40.0, 4, WindowLayout::vectorized};
    CHECK((array_window(kUpa, wv) - taylor_window_1d(64, wv)).norm() == 0.0);
    for (WindowLayout l : {WindowLayout::azimuth, WindowLayout::vectorized, WindowLayout::separable})
      CHECK(window_layout_from_string(to_string(l)) == l);
  }

  TEST_CASE("windowed cbf losses and beamwidths") {
    const std::vector<Direction> broadside{Direction{}};
    const CVec a = array_response(kUpa, Direction{});
    const double g_cbf = gain(a, to_matrix(cbf(kUpa, broadside, kExact)).col(0));
    const CVec f20 = to_matrix(windowed_cbf(kUpa, broadside, kFine, {20.0, 4, WindowLayout::azimuth})).col(0);
    const CVec f40 = to_matrix(windowed_cbf(kUpa, broadside, kFine, {40.0, 4, WindowLayout::azimuth})).col(0);
    const double loss20 = 10.0 * std::log10(g_cbf / gain(a, f20));
    const double loss40 = 10.0 * std::log10(g_cbf / gain(a, f40));
    CHECK(std::abs(loss20 - 2.0) <= 1.0);
    CHECK(std::abs(loss40 - 5.0) <= 1.5);

    const CVec f0 = to_matrix(cbf(kUpa, broadside, kExact)).col(0);
    CHECK(beamwidth_deg(f40) > beamwidth_deg(f20));
    CHECK(beamwidth_deg(f20) > beamwidth_deg(f0));

    const auto ones = tapered_cbf(kUpa, broadside, kFive, RVec::Ones(64), "CBF");
    CHECK(ones.beams == cbf(kUpa, broadside, kFive).beams);
  }

  TEST_CASE("scaling") {
    const auto dirs = coverage_grid(DirectionGrid::default_region());
    const auto cb = cbf(kUpa, dirs, kFive);
    CHECK(scale(cb, 1.0).beams == cb.beams);
    CHECK_THROWS(scale(cb, 0.0));

    QuantizationSpec lin_fine{30, 20, 0.25, AmpMode::linear};
    const auto fine = cbf(kUpa, dirs, lin_fine);
    const CMat f = to_matrix(fine);
    const CMat fs = to_matrix(scale(fine, 0.5));
    CHECK((fs - 0.5 * f).norm() < 1e-5 * f.norm());

    // 10^(-8/20) lies below the 7.75 dB attenuator range: every weight saturates.
    const auto sat = scale(cb, std::pow(10.0, -8.0 / 20.0));
    CHECK(sat.saturated_weights == 64 * 45);
    for (const auto& b : sat.beams)
      for (const auto& w : b.weights) CHECK(w.amp_idx == 31);
  }

  TEST_CASE("from_matrix and to_matrix") {
    const auto dirs = coverage_grid(DirectionGrid::default_region());
    const CMat a = steering_matrix(kUpa, dirs).entries;
    const auto cb = from_matrix(kUpa, dirs, kFive, a, "x");
    CHECK(cb.beams == cbf(kUpa, dirs, kFive).beams);
    const CMat m = to_matrix(cb);
    for (Eigen::Index i = 0; i < m.cols(); ++i) CHECK(m.col(i).squaredNorm() <= 64.0 + 1e-12);
    CHECK(count_below_floor(CVec::Constant(4, cd(0.1, 0.0)), kFive) == 4);
    CHECK(count_below_floor(CVec::Ones(4), kFive) == 0);
  }

  TEST_CASE("json round trip and rejection of bad files") {
    const auto dirs = coverage_grid(DirectionGrid::default_region());
    const auto cb = windowed_cbf(kUpa, dirs, kFive, {20.0, 4, WindowLayout::azimuth});
    const auto back = codebook_from_json_string(to_json_string(cb));
    CHECK(back == cb);
    for (std::size_t i = 0; i < dirs.size(); ++i) CHECK(back.directions[i] == cb.directions[i]);

    const auto dir = std::filesystem::temp_directory_path() / "fdbeam_codebook_test";
    std::filesystem::create_directories(dir);
    save(cb, dir / "cb.json");
    CHECK(load(dir / "cb.json") == cb);

    std::string text = to_json_string(cb);
    auto j = nlohmann::json::parse(text);
    j["version"] = 9;
    CHECK_THROWS_AS(codebook_from_json_string(j.dump()), FormatError);
    j = nlohmann::json::parse(text);
    j["beams"][0]["phase_idx"][0] = 32;
    CHECK_THROWS_AS(codebook_from_json_string(j.dump()), FormatError);
    j = nlohmann::json::parse(text);
    j["beams"][0]["amp_idx"].erase(0);
    CHECK_THROWS_AS(codebook_from_json_string(j.dump()), FormatError);
    j = nlohmann::json::parse(text);
    j["beams"].erase(0);
    CHECK_THROWS_AS(codebook_from_json_string(j.dump()), FormatError);
    CHECK_THROWS_AS(codebook_from_json_string("{not json"), FormatError);
    CHECK_THROWS_AS(load(dir / "missing.json"), FormatError);
    std::filesystem::remove_all(dir);
  }
}
