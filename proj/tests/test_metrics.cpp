#include "doctest.h"

#include <random>

#include "fdbeam/codebooks.hpp"
#include "fdbeam/metrics.hpp"
#include "oracles.hpp"

using namespace fdbeam;

namespace {
const ArrayGeometry kUpa{8, 8, 0.5, Eigen::Vector3d::Zero()};
}

TEST_SUITE("metrics") {
  TEST_CASE("average coupling") {
    Rng rng(1);
    const CMat h = rng.complex_normal(4, 4);
    const CMat f = rng.complex_normal(4, 3);
    CHECK(average_coupling(CMat::Zero(4, 3), h, f).E == 0.0);
    CHECK(std::isinf(average_coupling(CMat::Zero(4, 3), h, f).E_db));

    const CMat one = CMat::Ones(1, 1);
    CHECK(average_coupling(one, one, one).E == 1.0);

    for (int t = 0; t < 20; ++t) {
      const CMat w = rng.complex_normal(4, 3);
      const CMat ff = rng.complex_normal(4, 3);
      const CMat hh = rng.complex_normal(4, 4);
      const auto r = average_coupling(w, hh, ff);
      CHECK(r.E == doctest::Approx(oracle::coupling(w, hh, ff)).epsilon(1e-12));
      CHECK(r.E == doctest::Approx(r.pair_matrix.mean()).epsilon(1e-12));
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          CHECK(r.pair_matrix(j, i) == doctest::Approx(std::norm(w.col(j).dot(hh * ff.col(i)))).epsilon(1e-12));
      const cd alpha(0.3, -1.1), beta(2.0, 0.5);
      const double scaled = average_coupling(alpha * w, hh, beta * ff).E;
      CHECK(scaled == doctest::Approx(std::norm(alpha) * std::norm(beta) * r.E).epsilon(1e-12));
    }
    CHECK_THROWS(average_coupling(rng.complex_normal(3, 2), h, f));
  }

  TEST_CASE("coverage and median") {
    const auto dirs = coverage_grid(DirectionGrid::default_region());
    const auto cb = cbf(kUpa, dirs, QuantizationSpec::unquantized_phase());
    const auto on_grid = coverage(cb, dirs);
    for (Eigen::Index d = 0; d < on_grid.gains.size(); ++d) CHECK(on_grid.gains[d] == doctest::Approx(4096.0));

    const auto dense = dense_eval_grid(DirectionGrid::default_region(), 121, 61);
    const auto cov = coverage(cb, dense);
    CHECK(cov.gains.maxCoeff() <= 4096.0 + 1e-9);
    CHECK(cov.median_db >= 10.0 * std::log10(4096.0 * 0.5));
    for (Eigen::Index k = 1; k < cov.cdf.size(); ++k) CHECK(cov.cdf[k - 1] <= cov.cdf[k]);
    CHECK(cov.median_db == doctest::Approx(10.0 * std::log10(median(cov.gains))));

    // Single beam: gains are its pattern.
    const CVec f = array_response(kUpa, dirs[7]);
    CMat beams = f;
    const auto single = coverage(beams, kUpa, dense);
    for (std::size_t d = 0; d < dense.size(); d += 97) {
      const CVec a = oracle::steering(8, 8, 0.5, dense[d].azimuth, dense[d].elevation);
      CHECK(single.gains[static_cast<Eigen::Index>(d)] == doctest::Approx(std::norm(a.dot(f))).epsilon(1e-9));
    }

    RVec odd(3), even(4);
    odd << 3.0, 1.0, 2.0;
    even << 4.0, 1.0, 3.0, 2.0;
    CHECK(median(odd) == 2.0);
    CHECK(median(even) == 2.5);
    CHECK_THROWS(median(RVec()));
  }

  TEST_CASE("pattern cuts") {
    const CVec f = array_response(kUpa, Direction{});
    const auto cut = pattern_cut(f, kUpa, CutAxis::azimuth, 0.0, -kPi / 2, kPi / 2, 181);
    Eigen::Index peak = 0;
    cut.gains.maxCoeff(&peak);
    CHECK(cut.angles[peak] == doctest::Approx(0.0));
    CHECK(cut.gains[peak] == doctest::Approx(4096.0));
    for (Eigen::Index k = 0; k < 181; ++k) CHECK(cut.gains[k] == doctest::Approx(cut.gains[180 - k]).epsilon(1e-9));

    const CVec t40 = to_matrix(windowed_cbf(kUpa, {Direction{}}, QuantizationSpec{20, 20, 0.25, AmpMode::linear},
                                            {40.0, 4, WindowLayout::azimuth}))
                         .col(0);
    const auto c40 = pattern_cut(t40, kUpa, CutAxis::azimuth, 0.0, -kPi / 2, kPi / 2, 20001);
    const double top = c40.gains.maxCoeff();
    double side = 0.0;
    bool past_null = false;
    for (Eigen::Index k = 10001; k < c40.gains.size(); ++k) {
      if (!past_null && c40.gains[k] > c40.gains[k - 1]) past_null = true;
      if (past_null) side = std::max(side, c40.gains[k]);
    }
    CHECK(10.0 * std::log10(side / top) <= -35.0);

    const auto el = pattern_cut(f, kUpa, CutAxis::elevation, 0.0, -0.5, 0.5, 11);
    CHECK(el.angles[0] == doctest::Approx(-0.5));
    CHECK(el.gains[5] == doctest::Approx(4096.0));
  }

  TEST_CASE("coverage constraint") {
    const auto dirs = coverage_grid(DirectionGrid::default_region());
    const CMat a = steering_matrix(kUpa, dirs).entries;
    const double delta = std::sqrt(0.5);
    const auto exact = check_coverage_constraint(delta * a, a, delta * 64.0, 0.01);
    CHECK(exact.lhs == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(exact.residual() == doctest::Approx(-0.01 * delta * delta * 4096.0 * 45.0));

    CMat off = delta * a;
    off.col(3) *= 0.9;
    CHECK(check_coverage_constraint(off, a, delta * 64.0, 0.0).residual() > 0.0);
    // Phase rotation alone is not a violation.
    CHECK(check_coverage_constraint(cd(0.0, 1.0) * delta * a, a, delta * 64.0, 0.0).lhs ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("link rates") {
    const LinkBudget unit{1.0, 1.0, 1.0};
    const CVec h = CVec::Ones(4);
    CHECK(rate_tx(unit, h, CVec::Zero(4), 4) == 0.0);
    CVec f = CVec::Zero(4);
    f[0] = 2.0;  // |h^H f|^2 = 4 = Nt
    CHECK(rate_tx(unit, h, f, 4) == doctest::Approx(1.0));
    CHECK(rate_tx(unit, h, 2.0 * f, 4) > rate_tx(unit, h, f, 4));

    Rng rng(2);
    const CMat hh = rng.complex_normal(4, 4);
    const CVec w = rng.complex_normal(4, 1);
    const CVec hr = rng.complex_normal(4, 1);
    const LinkBudget clean{1.0, 3.0, 0.0};
    CHECK(rate_rx(clean, hr, w, hh, f) ==
          doctest::Approx(std::log2(1.0 + 3.0 * std::norm(w.dot(hr)) / w.squaredNorm())));
    CHECK(rate_rx(clean, hr, CVec::Zero(4), hh, f) == 0.0);
    const LinkBudget huge{1.0, 3.0, std::numeric_limits<double>::infinity()};
    CHECK(rate_rx(huge, hr, w, hh, f) == 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int e = -3; e <= 13; ++e) {
      const double r = rate_rx({1.0, 3.0, std::pow(10.0, e)}, hr, w, hh, f);
      CHECK(r <= prev);
      prev = r;
    }

    const CVec los = array_response(kUpa, Direction{0.3, 0.1});
    const auto cap = capacities({2.0, 1.0, 1.0}, los, los, 64);
    CHECK(cap.c_fd == doctest::Approx(std::log2(1.0 + 2.0 * 64.0) + std::log2(1.0 + 64.0)));
    CHECK(cap.c_hd == cap.c_fd / 2.0);

    const auto rep = rates({2.0, 1.0, 10.0}, los, los, los, los, CMat::Zero(64, 64));
    CHECK(rep.sum == rep.r_tx + rep.r_rx);
    CHECK(rep.c_hd == 0.5 * rep.c_fd);
    CHECK(rep.sum <= rep.c_fd + 1e-12);
    CHECK_THROWS(LinkBudget{-1.0, 1.0, 1.0}.validate());
  }
}
