#include "doctest.h"

#include "fdbeam/solver.hpp"
#include "oracles.hpp"

using namespace fdbeam;

namespace {

CVec random_vec(Rng& rng, int n, double scale = 1.0) {
  CVec v(n);
  for (auto& x : v) x = scale * rng.complex_normal();
  return v;
}

bool feasible(const BeamSubproblem& p, const CVec& f, double tol) {
  const double z = std::abs(p.g_tgt() - p.steer().dot(f));
  return z <= p.sigma() * p.g_tgt() + tol && f.cwiseAbs().maxCoeff() <= 1.0 + tol;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("subproblem construction") {
    const CVec a = CVec::Ones(4);
    CHECK_THROWS_AS(BeamSubproblem(CMat::Zero(1, 4), a, 5.0, 0.1, 0.0), InfeasibleError);
    CHECK_NOTHROW(BeamSubproblem(CMat::Zero(1, 4), a, 4.0, 0.0, 0.0));
    CHECK_THROWS_AS(BeamSubproblem(CMat::Zero(1, 3), a, 1.0, 0.1, 0.0), Error);
    CHECK_THROWS_AS(BeamSubproblem(CMat::Zero(1, 4), a, -1.0, 0.1, 0.0), Error);
    CHECK_THROWS_AS(BeamSubproblem(CMat::Zero(1, 4), CVec::Zero(4), 1.0, 0.1, 0.0), Error);
    SolverConfig bad;
    bad.max_iters = 0;
    CHECK_THROWS(bad.validate());
  }

  TEST_CASE("gain disc projection") {
    Rng rng(1);
    const CVec a = random_vec(rng, 6);
    const double g = 2.0, sigma = 0.2;
    const CVec zero = CVec::Zero(6);
    const CVec p0 = project_gain_disc(zero, a, g, 0.0);
    CHECK(std::abs(a.dot(p0) - g) < 1e-12);
    CHECK((p0 - a * (g / a.squaredNorm())).norm() < 1e-12);

    for (int t = 0; t < 20; ++t) {
      const CVec f = random_vec(rng, 6);
      const CVec p = project_gain_disc(f, a, g, sigma);
      const double dist = std::abs(g - a.dot(p));
      if (std::abs(g - a.dot(f)) <= sigma * g) {
        CHECK(p == f);
        continue;
      }
      CHECK(std::abs(dist - sigma * g) < 1e-10);
      // No feasible point of the disc is closer to f.
      for (int s = 0; s < 100; ++s) {
        CVec q = random_vec(rng, 6, 2.0);
        q = project_gain_disc(q, a, g, sigma * rng.uniform(0.0, 1.0));
        CHECK((p - f).norm() <= (q - f).norm() + 1e-12);
      }
    }
    CHECK_THROWS(project_gain_disc(zero, zero, g, sigma));
  }

  TEST_CASE("box projection") {
    CVec f(3);
    f << std::polar(2.0, 0.7), cd(0.3, 0.1), cd(0.0, 0.0);
    const CVec p = project_box(f);
    CHECK(std::abs(p[0] - std::polar(1.0, 0.7)) < 1e-15);
    CHECK(p[1] == f[1]);
    CHECK(p[2] == cd(0.0, 0.0));
  }

  TEST_CASE("feasibility projection") {
    Rng rng(2);
    CVec a(8);
    for (auto& x : a) x = std::polar(1.0, rng.uniform(-kPi, kPi));
    const BeamSubproblem p(rng.complex_normal(3, 8), a, 6.0, 0.1);

    const CVec inside = p.center();
    CHECK(feasible(p, inside, 1e-12));
    CHECK((project_feasible(inside, p, 50) - inside).norm() < 1e-12);

    for (int t = 0; t < 50; ++t) {
      const CVec f = random_vec(rng, 8, 1.5);
      const CVec q = project_feasible(f, p, 50);
      CHECK(p.gain_residual(q) <= 1e-8);
      CHECK(p.box_residual(q) <= 1e-8);
    }

    // Extreme feasible point: sigma 0 and g = ||a||_1 leaves only the unit-modulus conjugate.
    const BeamSubproblem tight(CMat::Zero(1, 8), a, 8.0, 0.0);
    const CVec q = project_feasible(CVec::Zero(8), tight, 50);
    CHECK(tight.gain_residual(q) <= 1e-8);
    CHECK(tight.box_residual(q) <= 1e-8);
    for (const auto& x : q) CHECK(std::abs(x) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("zero coupling and sigma zero") {
    const CVec a = CVec::Ones(4);
    const BeamSubproblem p(CMat::Zero(2, 4), a, 3.0, 0.1);
    const auto r = solve_beam(p);
    CHECK(r.objective == 0.0);
    CHECK(r.gain_residual <= 1e-8);

    Rng rng(3);
    const BeamSubproblem exact(rng.complex_normal(2, 4), a, 3.0, 0.0);
    const auto e = solve_beam(exact);
    CHECK(std::abs(a.dot(e.f) - 3.0) <= 1e-8);
    CHECK(e.box_residual <= 1e-8);
  }

  TEST_CASE("documented two-element instance") {
    CVec a(2);
    a << 1.0, 1.0;
    CMat m(1, 2);
    m << 1.0, 0.0;
    const BeamSubproblem p(m, a, 0.9, 0.1);
    const auto r = solve_beam(p);
    CHECK(r.objective <= 1e-6);
    CHECK(r.gain_residual <= 1e-8);
    const auto o = oracle_solve(p);
    CHECK(o.objective <= 1e-6);
    CHECK_THROWS(oracle_solve(BeamSubproblem(CMat::Zero(1, 3), CVec::Ones(3), 1.0, 0.1)));
    CHECK(oracle_solve(BeamSubproblem(CMat::Zero(1, 2), a, 1.0, 0.1)).objective == 0.0);
  }

  TEST_CASE("agreement with the grid oracle") {
    Rng rng(4);
    for (int k = 0; k < 10; ++k) {
      const auto p = oracle::random_pair_problem(k, rng);
      const auto r = solve_beam(p);
      const auto o = oracle_solve(p);
      CHECK(std::abs(r.objective - o.objective) <= std::max(1e-3, 1e-2 * o.objective));
      CHECK(r.gain_residual <= 1e-8);
      CHECK(r.box_residual <= 1e-8);
    }
  }

  TEST_CASE("objective soundness, warm start and determinism") {
    Rng rng(5);
    CVec a(16);
    for (auto& x : a) x = std::polar(1.0, rng.uniform(-kPi, kPi));
    for (double rho : {0.0, 0.5}) {
      const BeamSubproblem p(rng.complex_normal(6, 16), a, 12.0, 0.1, rho);
      SolverConfig cfg;
      cfg.warm_start = project_box(a * (12.0 / 16.0));
      const double warm = p.objective(*cfg.warm_start);
      const auto r = solve_beam(p, cfg);
      CHECK(r.objective == doctest::Approx(p.objective(r.f)).epsilon(1e-12));
      CHECK(r.objective <= warm);
      CHECK(r.gain_residual <= 1e-8);
      CHECK(r.box_residual <= 1e-8);
      const auto again = solve_beam(p, cfg);
      CHECK(again.f == r.f);

      SolverConfig sub = cfg;
      sub.step_rule = StepRule::diminishing;
      const auto s = solve_beam(p, sub);
      CHECK(s.gain_residual <= 1e-8);
      CHECK(s.objective <= warm);
      // Midpoint of two solutions cannot be much better than either, by convexity.
      const CVec mid = project_feasible(0.5 * (r.f + s.f), p, 50);
      CHECK(p.objective(mid) >= std::min(r.objective, s.objective) - 1e-6 * (1.0 + r.objective));
    }
  }
}
