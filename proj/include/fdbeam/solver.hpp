#pragma once

#include <optional>

#include "fdbeam/types.hpp"

namespace fdbeam {

// minimize ||M f|| + rho ||f||  s.t.  |g_tgt - a^H f| <= sigma g_tgt,  |f_n| <= 1.
//
// For a transmit beam M = W^H H; for a receive beam M = (H F)^H and f is the combiner.
class BeamSubproblem {
 public:
  // Throws InfeasibleError when g_tgt (1 - sigma) > ||a||_1, which is exactly when the
  // feasible set is empty.
  BeamSubproblem(CMat coupling, CVec steer, double g_tgt, double sigma, double rho = 0.0);

  const CMat& coupling() const { return coupling_; }
  const CVec& steer() const { return steer_; }
  double g_tgt() const { return g_tgt_; }
  double sigma() const { return sigma_; }
  double rho() const { return rho_; }
  Eigen::Index size() const { return steer_.size(); }

  double objective(const CVec& f) const { return (coupling_ * f).norm() + rho_ * f.norm(); }
  double gain_residual(const CVec& f) const;
  double box_residual(const CVec& f) const;

  // Interior-ish feasible point t * sign(a) with t = min(1, g / ||a||_1).
  CVec center() const;

 private:
  CMat coupling_;
  CVec steer_;
  double g_tgt_;
  double sigma_;
  double rho_;
};

enum class StepRule {
  accelerated,  // FISTA on ||Mf||^2 when rho = 0, on a smoothed objective otherwise
  diminishing,  // projected subgradient, normalized step D / sqrt(k + 1)
};

struct SolverConfig {
  int max_iters = 2000;
  StepRule step_rule = StepRule::accelerated;
  int dykstra_iters = 50;
  double feas_tol = 1e-8;
  double obj_tol = 1e-7;
  std::optional<CVec> warm_start;

  void validate() const;
};

struct SolverResult {
  CVec f;
  double objective = 0.0;
  double gain_residual = 0.0;
  double box_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Exact Euclidean projection onto {f : |g - a^H f| <= sigma g}.
CVec project_gain_disc(const CVec& f, const CVec& a, double g_tgt, double sigma);

// Clamp every entry to magnitude <= 1, keeping its phase.
CVec project_box(const CVec& f);

// Dykstra's alternating projections between the gain disc and the box, followed by an
// exact repair that returns a point satisfying both constraints.
CVec project_feasible(const CVec& f, const BeamSubproblem& problem, int dykstra_iters);

SolverResult solve_beam(const BeamSubproblem& problem, const SolverConfig& config = {});

// Brute-force reference for N <= 2: polar grid over f_1 and over z = a^H f inside the gain
// disc (f_2 then follows), refined by a shrinking pattern search around the best points.
SolverResult oracle_solve(const BeamSubproblem& problem, double mag_step = 0.02, double phase_step_deg = 4.0);

}  // namespace fdbeam
