#include "fdbeam/designer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdbeam/linalg.hpp"

namespace fdbeam {

void DesignParams::validate() const {
  if (!(delta_tx_sq > 0.0 && delta_tx_sq <= 1.0) || !(delta_rx_sq > 0.0 && delta_rx_sq <= 1.0)) {
    throw Error("design: delta^2 must lie in (0, 1]");
  }
  if (!(sigma_tx_sq >= 0.0) || !(sigma_rx_sq >= 0.0)) throw Error("design: sigma^2 must be nonnegative");
  if (!(eps_tilde >= 0.0)) throw Error("design: eps_tilde must be nonnegative");
  if (passes < 1) throw Error("design: passes must be at least 1");
  spec_tx.validate();
  spec_rx.validate();
  solver.validate();
}

TargetGains target_gains(const DesignParams& params, int nt, int nr) {
  return {std::sqrt(params.delta_tx_sq) * nt, std::sqrt(params.delta_rx_sq) * nr};
}

namespace {

Codebook init_side(const ArrayGeometry& geom, const std::vector<Direction>& dirs, const QuantizationSpec& spec,
                   double delta_sq, const char* side, std::vector<std::string>& warnings) {
  const CMat a = steering_matrix(geom, dirs).entries * std::sqrt(delta_sq);
  Codebook cb = from_matrix(geom, dirs, spec, a, std::string("design-") + side);
  if (cb.saturated_weights > 0) {
    warnings.push_back(std::string(side) + ": " + std::to_string(cb.saturated_weights) +
                       " weights below the attenuator range were saturated at initialization");
  }
  return cb;
}

}  // namespace

InitResult initialize(const ArrayGeometry& geom_tx, const ArrayGeometry& geom_rx, const std::vector<Direction>& dirs_tx,
                      const std::vector<Direction>& dirs_rx, const DesignParams& params) {
  params.validate();
  InitResult out;
  out.tx = init_side(geom_tx, dirs_tx, params.spec_tx, params.delta_tx_sq, "tx", out.warnings);
  out.rx = init_side(geom_rx, dirs_rx, params.spec_rx, params.delta_rx_sq, "rx", out.warnings);
  return out;
}

double regularized_objective(const CMat& w_mat, const CMat& h, const CMat& f_mat, double eps_tilde) {
  const double nominal = (w_mat.adjoint() * h * f_mat).norm();
  if (eps_tilde == 0.0) return nominal;
  const double scale = std::sqrt(static_cast<double>(h.rows() * h.cols()));
  return nominal + eps_tilde * scale * max_singular_value(w_mat) * max_singular_value(f_mat);
}

DesignResult design(const CMat& h, const ArrayGeometry& geom_tx, const ArrayGeometry& geom_rx,
                    const std::vector<Direction>& dirs_tx, const std::vector<Direction>& dirs_rx,
                    const DesignParams& params) {
  params.validate();
  const int nt = geom_tx.size();
  const int nr = geom_rx.size();
  if (h.rows() != nr || h.cols() != nt) throw Error("design: channel must be Nr x Nt");
  if (dirs_tx.empty() || dirs_rx.empty()) throw Error("design: empty coverage grid");

  DesignResult res;
  InitResult init = initialize(geom_tx, geom_rx, dirs_tx, dirs_rx, params);
  res.warnings = init.warnings;
  Codebook tx = std::move(init.tx);
  Codebook rx = std::move(init.rx);
  const CMat a_tx = steering_matrix(geom_tx, dirs_tx).entries;
  const CMat a_rx = steering_matrix(geom_rx, dirs_rx).entries;
  CMat f_real = to_matrix(tx);
  CMat w_real = to_matrix(rx);
  res.tx_unquantized = a_tx * std::sqrt(params.delta_tx_sq);
  res.rx_unquantized = a_rx * std::sqrt(params.delta_rx_sq);

  const TargetGains g = target_gains(params, nt, nr);
  const double sig_tx = std::sqrt(params.sigma_tx_sq);
  const double sig_rx = std::sqrt(params.sigma_rx_sq);
  const double reg_scale = params.eps_tilde * std::sqrt(static_cast<double>(nt) * nr);
  const int m_tx = static_cast<int>(dirs_tx.size());
  const int m_rx = static_cast<int>(dirs_rx.size());
  auto current_e = [&] { return (w_real.adjoint() * h * f_real).squaredNorm() / (double(m_tx) * m_rx); };
  res.objective_trace.push_back(current_e());

  for (int pass = 0; pass < params.passes; ++pass) {
    for (int k = 0; k < std::max(m_tx, m_rx); ++k) {
      if (k < m_tx) {
        const double rho = reg_scale > 0.0 ? reg_scale * max_singular_value(w_real) : 0.0;
        SolverConfig cfg = params.solver;
        cfg.warm_start = f_real.col(k);
        SolverResult sol;
        try {
          sol = solve_beam(BeamSubproblem(w_real.adjoint() * h, a_tx.col(k), g.tx, sig_tx, rho), cfg);
        } catch (const InfeasibleError& e) {
          throw InfeasibleError("design: transmit beam " + std::to_string(k) + ": " + e.what());
        }
        if (!sol.converged) ++res.solver_nonconverged;
        res.tx_unquantized.col(k) = sol.f;
        tx.beams[static_cast<std::size_t>(k)] = project_beam(sol.f, params.spec_tx);
        f_real.col(k) = realize(tx.beams[static_cast<std::size_t>(k)]);
        res.objective_trace.push_back(current_e());
      }
      if (k < m_rx) {
        const double rho = reg_scale > 0.0 ? reg_scale * max_singular_value(f_real) : 0.0;
        SolverConfig cfg = params.solver;
        cfg.warm_start = w_real.col(k);
        SolverResult sol;
        try {
          sol = solve_beam(BeamSubproblem((h * f_real).adjoint(), a_rx.col(k), g.rx, sig_rx, rho), cfg);
        } catch (const InfeasibleError& e) {
          throw InfeasibleError("design: receive beam " + std::to_string(k) + ": " + e.what());
        }
        if (!sol.converged) ++res.solver_nonconverged;
        res.rx_unquantized.col(k) = sol.f;
        rx.beams[static_cast<std::size_t>(k)] = project_beam(sol.f, params.spec_rx);
        w_real.col(k) = realize(rx.beams[static_cast<std::size_t>(k)]);
        res.objective_trace.push_back(current_e());
      }
    }
  }

  tx.saturated_weights = 0;
  rx.saturated_weights = 0;
  for (int k = 0; k < m_tx; ++k) tx.saturated_weights += count_below_floor(res.tx_unquantized.col(k), params.spec_tx);
  for (int k = 0; k < m_rx; ++k) rx.saturated_weights += count_below_floor(res.rx_unquantized.col(k), params.spec_rx);

  res.E_final = average_coupling(w_real, h, f_real).E;
  res.per_beam_gain_tx = (a_tx.adjoint() * f_real).diagonal().cwiseAbs();
  res.per_beam_gain_rx = (a_rx.adjoint() * w_real).diagonal().cwiseAbs();
  res.coverage_tx = check_coverage_constraint(f_real, a_tx, g.tx, params.sigma_tx_sq);
  res.coverage_rx = check_coverage_constraint(w_real, a_rx, g.rx, params.sigma_rx_sq);
  res.coverage_tx_pre = check_coverage_constraint(res.tx_unquantized, a_tx, g.tx, params.sigma_tx_sq);
  res.coverage_rx_pre = check_coverage_constraint(res.rx_unquantized, a_rx, g.rx, params.sigma_rx_sq);
  res.tx_codebook = std::move(tx);
  res.rx_codebook = std::move(rx);
  return res;
}

DesignResult design_robust(const CMat& h_est, const ArrayGeometry& geom_tx, const ArrayGeometry& geom_rx,
                           const std::vector<Direction>& dirs_tx, const std::vector<Direction>& dirs_rx,
                           const DesignParams& params) {
  return design(h_est, geom_tx, geom_rx, dirs_tx, dirs_rx, params);
}

}  // namespace fdbeam
