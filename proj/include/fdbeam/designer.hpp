#pragma once

#include <string>
#include <vector>

#include "fdbeam/codebooks.hpp"
#include "fdbeam/metrics.hpp"
#include "fdbeam/solver.hpp"

namespace fdbeam {

struct DesignParams {
  double delta_tx_sq = 1.0;    // tolerated power-gain loss, (0, 1]
  double delta_rx_sq = 1.0;
  double sigma_tx_sq = 0.01;   // normalized variance tolerance
  double sigma_rx_sq = 0.01;
  double eps_tilde = 0.0;      // robustness weight
  QuantizationSpec spec_tx;
  QuantizationSpec spec_rx;
  SolverConfig solver;
  int passes = 1;

  void validate() const;
};

struct TargetGains {
  double tx = 0.0;  // amplitude, sqrt(delta_tx_sq) * Nt
  double rx = 0.0;
};

TargetGains target_gains(const DesignParams& params, int nt, int nr);

struct InitResult {
  Codebook tx;
  Codebook rx;
  std::vector<std::string> warnings;
};

// Each beam is P(sqrt(delta^2) a(dir)).
InitResult initialize(const ArrayGeometry& geom_tx, const ArrayGeometry& geom_rx, const std::vector<Direction>& dirs_tx,
                      const std::vector<Direction>& dirs_rx, const DesignParams& params);

struct DesignResult {
  Codebook tx_codebook;
  Codebook rx_codebook;
  double E_final = 0.0;
  RVec per_beam_gain_tx;  // |a_i^H f_i| after quantization
  RVec per_beam_gain_rx;
  std::vector<double> objective_trace;  // E after every beam write, starting from the initialization
  CoverageConstraintReport coverage_tx;      // quantized
  CoverageConstraintReport coverage_rx;
  CoverageConstraintReport coverage_tx_pre;  // solver output before quantization
  CoverageConstraintReport coverage_rx_pre;
  CMat tx_unquantized;  // Nt x Mtx solver outputs
  CMat rx_unquantized;
  std::vector<std::string> warnings;
  int solver_nonconverged = 0;
};

// Alternating beam-by-beam design: transmit beam k, then receive beam k, for k up to
// max(Mtx, Mrx), with quantization after each solve. With eps_tilde > 0 every subproblem
// carries the robust regularizer eps_tilde sqrt(Nt Nr) ||counterpart||_2.
DesignResult design(const CMat& h, const ArrayGeometry& geom_tx, const ArrayGeometry& geom_rx,
                    const std::vector<Direction>& dirs_tx, const std::vector<Direction>& dirs_rx,
                    const DesignParams& params);

// Robust variant: the same flow, driven by params.eps_tilde. eps_tilde = 0 reproduces design().
DesignResult design_robust(const CMat& h_est, const ArrayGeometry& geom_tx, const ArrayGeometry& geom_rx,
                           const std::vector<Direction>& dirs_tx, const std::vector<Direction>& dirs_rx,
                           const DesignParams& params);

// ||W^H H F||_F + eps_tilde sqrt(Nt Nr) ||W||_2 ||F||_2.
double regularized_objective(const CMat& w_mat, const CMat& h, const CMat& f_mat, double eps_tilde);

}  // namespace fdbeam
