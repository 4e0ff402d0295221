#pragma once

#include <vector>

#include "fdbeam/codebooks.hpp"

namespace fdbeam {

struct CouplingReport {
  double E = 0.0;
  double E_db = 0.0;  // -inf when E == 0
  Eigen::MatrixXd pair_matrix;  // Mrx x Mtx, entry (j, i) = |w_j^H H f_i|^2
};

// E = ||W^H H F||_F^2 / (Mtx Mrx). W is Nr x Mrx, H is Nr x Nt, F is Nt x Mtx.
CouplingReport average_coupling(const CMat& w_mat, const CMat& h, const CMat& f_mat);
CouplingReport average_coupling(const Codebook& rx, const CMat& h, const Codebook& tx);

struct CoverageReport {
  std::vector<Direction> directions;
  RVec gains;  // power gain of the best beam per direction
  RVec cdf;    // gains sorted ascending
  double median_db = 0.0;
};

// Best-beam power gain max_i |a(d)^H f_i|^2 over each direction d.
CoverageReport coverage(const CMat& beams, const ArrayGeometry& geometry, const std::vector<Direction>& grid);
CoverageReport coverage(const Codebook& codebook, const std::vector<Direction>& grid);

// Median of a sample (mean of the two middle values for even sizes).
double median(RVec values);

enum class CutAxis { azimuth, elevation };

struct PatternCut {
  RVec angles;  // radians
  RVec gains;   // |a^H f|^2
};

// Uniform sweep of one angle over [lo, hi] with the other held at `fixed`.
PatternCut pattern_cut(const CVec& beam, const ArrayGeometry& geometry, CutAxis axis, double fixed, double lo,
                       double hi, int n_points);

struct CoverageConstraintReport {
  double lhs = 0.0;    // sum_i (g - |a_i^H f_i|)^2
  double bound = 0.0;  // sigma^2 g^2 M
  double residual() const { return lhs - bound; }
};

// Aggregate coverage constraint of beam columns against their own steering columns. Uses
// gain magnitudes, so a common phase rotation of a beam does not count as a violation.
CoverageConstraintReport check_coverage_constraint(const CMat& beams, const CMat& steering, double g_tgt,
                                                   double sigma_sq);
CoverageConstraintReport check_coverage_constraint(const Codebook& codebook, double g_tgt, double sigma_sq);

// Linear SNR and INR before beamforming.
struct LinkBudget {
  double snr_tx = 1.0;
  double snr_rx = 1.0;
  double inr = 1.0;

  void validate() const;
};

struct RateReport {
  double r_tx = 0.0;
  double r_rx = 0.0;
  double sum = 0.0;
  double c_fd = 0.0;
  double c_hd = 0.0;
};

// log2(1 + snr_tx / Nt * |h^H f|^2)
double rate_tx(const LinkBudget& budget, const CVec& h_tx, const CVec& f, int nt);

// log2(1 + snr_rx |w^H h|^2 / (||w||^2 + inr |w^H H f|^2)); zero for w == 0.
double rate_rx(const LinkBudget& budget, const CVec& h_rx, const CVec& w, const CMat& h, const CVec& f);

struct Capacities {
  double c_fd = 0.0;
  double c_hd = 0.0;
};

// Per-link capacity with the per-entry magnitude budget: equal-gain transmit and matched
// receive combining, self-interference ignored.
Capacities capacities(const LinkBudget& budget, const CVec& h_tx, const CVec& h_rx, int nt);

RateReport rates(const LinkBudget& budget, const CVec& h_tx, const CVec& f, const CVec& h_rx, const CVec& w,
                 const CMat& h);

}  // namespace fdbeam
