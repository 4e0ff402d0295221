#include "fdbeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdbeam {

CouplingReport average_coupling(const CMat& w_mat, const CMat& h, const CMat& f_mat) {
  if (w_mat.rows() != h.rows() || h.cols() != f_mat.rows()) throw Error("average_coupling: shape mismatch");
  if (w_mat.cols() == 0 || f_mat.cols() == 0) throw Error("average_coupling: empty codebook");
  CouplingReport r;
  r.pair_matrix = (w_mat.adjoint() * h * f_mat).cwiseAbs2();
  r.E = r.pair_matrix.mean();
  r.E_db = r.E > 0.0 ? pow_to_db(r.E) : -std::numeric_limits<double>::infinity();
  return r;
}

CouplingReport average_coupling(const Codebook& rx, const CMat& h, const Codebook& tx) {
  return average_coupling(to_matrix(rx), h, to_matrix(tx));
}

double median(RVec values) {
  if (values.size() == 0) throw Error("median of an empty sample");
  std::sort(values.begin(), values.end());
  const Eigen::Index n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CoverageReport coverage(const CMat& beams, const ArrayGeometry& geometry, const std::vector<Direction>& grid) {
  if (beams.rows() != geometry.size()) throw Error("coverage: beam length does not match geometry");
  if (grid.empty()) throw Error("coverage: empty evaluation grid");
  CoverageReport r;
  r.directions = grid;
  const CMat a = steering_matrix(geometry, grid).entries;
  r.gains = (a.adjoint() * beams).cwiseAbs2().rowwise().maxCoeff();
  r.cdf = r.gains;
  std::sort(r.cdf.begin(), r.cdf.end());
  const double med = median(r.cdf);
  r.median_db = med > 0.0 ? pow_to_db(med) : -std::numeric_limits<double>::infinity();
  return r;
}

CoverageReport coverage(const Codebook& codebook, const std::vector<Direction>& grid) {
  return coverage(to_matrix(codebook), codebook.geometry, grid);
}

PatternCut pattern_cut(const CVec& beam, const ArrayGeometry& geometry, CutAxis axis, double fixed, double lo,
                       double hi, int n_points) {
  if (n_points < 2) throw Error("pattern_cut: need at least two points");
  if (beam.size() != geometry.size()) throw Error("pattern_cut: beam length does not match geometry");
  PatternCut cut;
  cut.angles = RVec::LinSpaced(n_points, lo, hi);
  cut.gains.resize(n_points);
  for (int k = 0; k < n_points; ++k) {
    const Direction d = axis == CutAxis::azimuth ? Direction{cut.angles[k], fixed} : Direction{fixed, cut.angles[k]};
    cut.gains[k] = std::norm(array_response(geometry, d).dot(beam));
  }
  return cut;
}

CoverageConstraintReport check_coverage_constraint(const CMat& beams, const CMat& steering, double g_tgt,
                                                   double sigma_sq) {
  if (beams.rows() != steering.rows() || beams.cols() != steering.cols()) {
    throw Error("coverage constraint: beams and steering columns differ in shape");
  }
  CoverageConstraintReport r;
  for (Eigen::Index i = 0; i < beams.cols(); ++i) {
    const double dev = g_tgt - std::abs(steering.col(i).dot(beams.col(i)));
    r.lhs += dev * dev;
  }
  r.bound = sigma_sq * g_tgt * g_tgt * static_cast<double>(beams.cols());
  return r;
}

CoverageConstraintReport check_coverage_constraint(const Codebook& codebook, double g_tgt, double sigma_sq) {
  return check_coverage_constraint(to_matrix(codebook), steering_matrix(codebook.geometry, codebook.directions).entries,
                                   g_tgt, sigma_sq);
}

void LinkBudget::validate() const {
  if (!(snr_tx >= 0.0) || !(snr_rx >= 0.0) || !(inr >= 0.0)) throw Error("link budget ratios must be nonnegative");
}

double rate_tx(const LinkBudget& budget, const CVec& h_tx, const CVec& f, int nt) {
  if (nt < 1) throw Error("rate_tx: Nt must be positive");
  return std::log2(1.0 + budget.snr_tx / nt * std::norm(h_tx.dot(f)));
}

double rate_rx(const LinkBudget& budget, const CVec& h_rx, const CVec& w, const CMat& h, const CVec& f) {
  const double noise = w.squaredNorm();
  if (noise == 0.0) return 0.0;
  const double si = std::norm(w.dot(h * f));
  if (std::isinf(budget.inr)) return si > 0.0 ? 0.0 : std::log2(1.0 + budget.snr_rx * std::norm(w.dot(h_rx)) / noise);
  return std::log2(1.0 + budget.snr_rx * std::norm(w.dot(h_rx)) / (noise + budget.inr * si));
}

Capacities capacities(const LinkBudget& budget, const CVec& h_tx, const CVec& h_rx, int nt) {
  if (nt < 1) throw Error("capacities: Nt must be positive");
  const double l1 = h_tx.cwiseAbs().sum();
  Capacities c;
  c.c_fd = std::log2(1.0 + budget.snr_tx / nt * l1 * l1) + std::log2(1.0 + budget.snr_rx * h_rx.squaredNorm());
  c.c_hd = 0.5 * c.c_fd;
  return c;
}

RateReport rates(const LinkBudget& budget, const CVec& h_tx, const CVec& f, const CVec& h_rx, const CVec& w,
                 const CMat& h) {
  RateReport r;
  const int nt = static_cast<int>(f.size());
  r.r_tx = rate_tx(budget, h_tx, f, nt);
  r.r_rx = rate_rx(budget, h_rx, w, h, f);
  r.sum = r.r_tx + r.r_rx;
  const Capacities c = capacities(budget, h_tx, h_rx, nt);
  r.c_fd = c.c_fd;
  r.c_hd = c.c_hd;
  return r;
}

}  // namespace fdbeam
