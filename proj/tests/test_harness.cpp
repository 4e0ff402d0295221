#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fdbeam/harness.hpp"
#include "oracles.hpp"

using namespace fdbeam;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  return config_from_json_string(R"({
    "geometry_tx": {"rows": 4, "cols": 4},
    "grid_tx": {"az_deg": [-30, 30, 30], "el_deg": [-15, 15, 30]},
    "dense_grid": {"n_az": 7, "n_el": 5},
    "axes": {"delta_db": [0, -3]},
    "eval": {"n_error_draws": 5},
    "link": {"snr_db": [0], "inr_db": [-300, 0, 20, 40, 60], "n_user_draws": 20},
    "trials": 2
  })");
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fdbeam_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

// Drops the trailing timing column.
std::string without_ms(const std::string& line) { return line.substr(0, line.rfind(',')); }

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("axis enumeration and seeds") {
    auto c = small_config();
    c.axes.eps_eval_db = {std::nullopt, -20.0};
    const auto pts = axis_points(c.axes);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].delta_db == 0.0);
    CHECK(!pts[0].eps_eval_db);
    CHECK(*pts[1].eps_eval_db == -20.0);
    CHECK(pts[2].delta_db == -3.0);
    CHECK(trial_seed(c, 0, 0) != trial_seed(c, 0, 1));
    CHECK(trial_seed(c, 0, 0) != trial_seed(c, 1, 0));
    CHECK(trial_seed(c, 1, 1) == stream_seed(c.master_seed, 1, 1));

    const auto p = design_params(c, pts[2]);
    CHECK(p.delta_tx_sq == doctest::Approx(db_to_pow(-3.0)));
    CHECK(p.sigma_rx_sq == doctest::Approx(0.01));
    CHECK(p.spec_tx.b_phs == 5);
    CHECK(p.eps_tilde == 0.0);
  }

  TEST_CASE("trial determinism and recomputable metrics") {
    const auto c = small_config();
    const AxisPoint pt = axis_points(c.axes)[1];
    const auto seed = trial_seed(c, 1, 0);
    TrialArtifacts art;
    const auto rows = run_trial_group(c, pt, {std::nullopt}, seed, {}, &art);
    const auto again = run_trial(c, pt, seed);
    CHECK(without_ms(to_csv_row(rows[0])) == without_ms(to_csv_row(again)));
    REQUIRE(art.design);
    CHECK(rows[0].status == "ok");
    CHECK((art.h - trial_channel(c, seed)).norm() == 0.0);
    CHECK(*rows[0].E_design_db == doctest::Approx(pow_to_db(art.design->E_final)));
    const double e_cbf = oracle::coupling(to_matrix(art.cbf_rx), art.h, to_matrix(art.cbf_tx));
    CHECK(*rows[0].E_cbf_db == doctest::Approx(pow_to_db(e_cbf)).epsilon(1e-12));
    // Benchmarks are scaled by the amplitude factor before quantization.
    const double amp = std::pow(10.0, -3.0 / 20.0);
    const auto ref = cbf(c.geometry_tx, coverage_grid(c.grid_tx), QuantizationSpec{5, 5, 0.25, AmpMode::log});
    CHECK(art.cbf_tx.beams == scale(ref, amp).beams);
  }

  TEST_CASE("zero channel is a null coupling") {
    const auto c = small_config();
    TrialOptions opt;
    opt.channel_override = CMat::Zero(16, 16);
    const auto r = run_trial(c, axis_points(c.axes)[0], 1, opt);
    CHECK(r.status == "ok");
    CHECK(!r.E_design_db);
    CHECK(!r.E_cbf_db);
    CHECK(r.med_gtx_db);
    const auto line = to_csv_row(r);
    const auto parsed = parse_csv_row(line);
    REQUIRE(parsed);
    CHECK(!parsed->E_design_db);
  }

  TEST_CASE("benchmark-only trials") {
    auto c = small_config();
    c.benchmark_only = true;
    const auto r = run_trial(c, axis_points(c.axes)[0], 5);
    CHECK(r.status == "benchmark");
    CHECK(!r.E_design_db);
    CHECK(r.E_cbf_db);
    CHECK(r.E_tay20_db);
    CHECK(r.E_tay40_db);
  }

  TEST_CASE("evaluation under channel error") {
    Rng rng(3);
    const CMat h = rng.complex_normal(4, 4);
    const CMat f = rng.complex_normal(4, 3), w = rng.complex_normal(4, 2);
    Rng r0(1);
    const auto zero = evaluate_under_error(f, w, h, 0.0, 4, r0);
    CHECK(zero.mean_E == average_coupling(w, h, f).E);
    CHECK(zero.std_E == 0.0);
    Rng r1(2);
    const auto rep = evaluate_under_error(f, w, h, 0.3, 50, r1);
    REQUIRE(rep.draws.size() == 50);
    const double bound = (w.adjoint() * h * f).norm() + 0.3 * 4.0 * oracle::sigma_max(w) * oracle::sigma_max(f);
    for (double e : rep.draws) CHECK(std::sqrt(e * 6.0) <= bound * (1.0 + 1e-12));
    double mean = 0.0;
    for (double e : rep.draws) mean += e / 50.0;
    CHECK(rep.mean_E == doctest::Approx(mean));
  }

  TEST_CASE("link sweep") {
    const auto c = small_config();
    const auto dirs = coverage_grid(c.grid_tx);
    const CMat f = to_matrix(cbf(c.geometry_tx, dirs, QuantizationSpec{5, 5, 0.25, AmpMode::log}));
    Rng hr(4);
    const CMat h = draw_rayleigh(16, 16, hr);
    Rng rng(5);
    const auto rows = link_sweep(c, f, f, h, rng);
    REQUIRE(rows.size() == 5);
    Rng rng0(5);
    const auto clean = link_sweep(c, f, f, CMat::Zero(16, 16), rng0);
    CHECK(rows[0].sum == doctest::Approx(clean[0].sum).epsilon(1e-9));
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].sum <= rows[k - 1].sum + 1e-12);
    for (const auto& r : rows) {
      CHECK(r.sum <= r.c_fd + 1e-12);
      CHECK(r.c_hd == 0.5 * r.c_fd);
    }
  }

  TEST_CASE("csv rows round trip") {
    TrialRecord r;
    r.seed = 1234567890123ULL;
    r.axis.delta_db = -3.0;
    r.axis.eps_tilde_db = -20.0;
    r.model = "rayleigh";
    r.E_design_db = 0.1 + 0.2;
    r.E_cbf_db = -1e-300;
    r.med_gtx_db = 33.3;
    r.cov_resid_tx = -12.5;
    r.cov_resid_rx = 1.0 / 3.0;
    r.ms = 12.25;
    const auto line = to_csv_row(r);
    CHECK(std::count(line.begin(), line.end(), ',') == 17);
    const auto back = parse_csv_row(line);
    REQUIRE(back);
    CHECK(to_csv_row(*back) == line);
    CHECK(*back->E_design_db == r.E_design_db);
    CHECK(!back->E_tay20_db);
    CHECK(csv_header().rfind("seed,delta_db,sigma_db,b_phs,b_amp,eps_tilde_db,eps_eval_db,model,", 0) == 0);
    CHECK_THROWS_AS(parse_csv_row("1,2,3"), FormatError);

    TrialRecord failed = r;
    failed.status = "failed: x";
    failed.E_design_db.reset();
    TrialRecord other = r;
    other.E_design_db = 10.0;
    other.E_cbf_db = 20.0;
    r.E_design_db = 0.0;
    r.E_cbf_db = 10.0;
    const auto agg = aggregate({r, failed, other});
    CHECK(agg.status == "agg 2/3");
    CHECK(*agg.E_design_db == doctest::Approx(pow_to_db((1.0 + 10.0) / 2.0)));
    CHECK(*agg.E_cbf_db == doctest::Approx(pow_to_db((10.0 + 100.0) / 2.0)));
    CHECK(!parse_csv_row(to_csv_row(agg)));
  }

  TEST_CASE("sweep writes, resumes and reproduces") {
    auto c = small_config();
    c.axes.delta_db = {0.0};
    c.trials = 1;
    const auto dir = scratch("one");
    const auto csv = dir / "sweep.csv";
    auto s = sweep(c, csv, {1, false, true, {}});
    auto lines = lines_of(csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == csv_header());
    CHECK(lines[2].rfind("agg,", 0) == 0);
    CHECK(fs::exists(dir / "sweep.manifest.json"));
    CHECK(s.completed == 1);

    c.trials = 3;
    const auto dir2 = scratch("resume");
    const auto csv2 = dir2 / "sweep.csv";
    // Only the first trial of the same configuration hash can be reused, so run a fresh
    // three-trial sweep, cut the CSV back to its first data row and resume.
    sweep(c, csv2, {2, false, true, {}});
    const auto full = lines_of(csv2);
    REQUIRE(full.size() == 5);
    {
      std::ofstream out(csv2, std::ios::trunc);
      out << full[0] << '\n' << full[1] << '\n' << full[2].substr(0, 20);
    }
    auto resumed = sweep(c, csv2, {1, false, true, {}});
    CHECK(resumed.resumed == 1);
    CHECK(resumed.completed == 2);
    const auto after = lines_of(csv2);
    REQUIRE(after.size() == full.size());
    for (std::size_t k = 1; k < full.size() - 1; ++k) CHECK(without_ms(after[k]) == without_ms(full[k]));

    // A third run has nothing left to do.
    auto idle = sweep(c, csv2, {1, false, true, {}});
    CHECK(idle.completed == 0);
    CHECK(idle.resumed == 3);

    // Different configuration against the same file is refused unless fresh.
    c.master_seed = 77;
    CHECK_THROWS_AS(sweep(c, csv2, {1, false, true, {}}), FormatError);
    CHECK_NOTHROW(sweep(c, csv2, {1, true, true, {}}));
    fs::remove_all(dir);
    fs::remove_all(dir2);
  }

  TEST_CASE("workers") {
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
    CHECK(build_id().rfind("fdbeam ", 0) == 0);
  }
}
