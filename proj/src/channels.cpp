#include "fdbeam/channels.hpp"

#include "fdbeam/linalg.hpp"

namespace fdbeam {

std::string model_name(const SIChannelModel& model) {
  struct Visitor {
    std::string operator()(const RayleighModel&) const { return "rayleigh"; }
    std::string operator()(const SphericalNearField&) const { return "spherical"; }
    std::string operator()(const FarFieldRays&) const { return "farfield"; }
    std::string operator()(const RicianMixture&) const { return "rician"; }
  };
  return std::visit(Visitor{}, model);
}

CMat draw_rayleigh(int nr, int nt, Rng& rng) {
  if (nr < 1 || nt < 1) throw Error("channel dimensions must be positive");
  return rng.complex_normal(nr, nt);
}

void normalize_frobenius(CMat& h) {
  const double energy = h.squaredNorm();
  if (!(energy > 0.0)) throw Error("cannot normalize an all-zero channel");
  h *= std::sqrt(static_cast<double>(h.rows() * h.cols()) / energy);
}

CMat spherical_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, double separation_wavelengths) {
  if (!(separation_wavelengths > 0.0)) throw Error("array separation must be positive");
  ArrayGeometry rx_placed = rx;
  rx_placed.origin = tx.origin + rx.origin + Eigen::Vector3d(0.0, separation_wavelengths, 0.0);
  const auto p_tx = absolute_positions(tx);
  const auto p_rx = absolute_positions(rx_placed);

  CMat h(static_cast<Eigen::Index>(p_rx.size()), static_cast<Eigen::Index>(p_tx.size()));
  double inv_sq_sum = 0.0;
  for (std::size_t n = 0; n < p_tx.size(); ++n) {
    for (std::size_t m = 0; m < p_rx.size(); ++m) {
      const double r = (p_rx[m] - p_tx[n]).norm();
      if (!(r > 0.0)) throw Error("spherical channel: coincident transmit and receive elements");
      h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = std::polar(1.0 / r, -2.0 * kPi * r);
      inv_sq_sum += 1.0 / (r * r);
    }
  }
  const double gamma = std::sqrt(static_cast<double>(h.rows() * h.cols()) / inv_sq_sum);
  h *= gamma;
  return h;
}

CMat farfield_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, int n_rays, Rng& rng) {
  if (n_rays < 1) throw Error("far-field channel needs at least one ray");
  CMat h = CMat::Zero(rx.size(), tx.size());
  for (int u = 0; u < n_rays; ++u) {
    const cd beta = rng.complex_normal();
    const Direction aoa{rng.uniform(-kPi / 2, kPi / 2), rng.uniform(-kPi / 2, kPi / 2)};
    const Direction aod{rng.uniform(-kPi / 2, kPi / 2), rng.uniform(-kPi / 2, kPi / 2)};
    h.noalias() += beta * array_response(rx, aoa) * array_response(tx, aod).adjoint();
  }
  h *= std::sqrt(1.0 / n_rays);
  normalize_frobenius(h);
  return h;
}

CMat rician_mixture(const CMat& h_nf, const CMat& h_ff, double kappa) {
  if (h_nf.rows() != h_ff.rows() || h_nf.cols() != h_ff.cols()) {
    throw Error("rician mixture: component shapes differ");
  }
  if (!(kappa >= 0.0)) throw Error("rician factor must be nonnegative");
  if (kappa == 0.0) return h_ff;
  return std::sqrt(kappa / (kappa + 1.0)) * h_nf + std::sqrt(1.0 / (kappa + 1.0)) * h_ff;
}

CMat draw_channel(const SIChannelModel& model, const ArrayGeometry& tx, const ArrayGeometry& rx, Rng& rng) {
  struct Visitor {
    const ArrayGeometry& tx;
    const ArrayGeometry& rx;
    Rng& rng;
    CMat operator()(const RayleighModel&) const { return draw_rayleigh(rx.size(), tx.size(), rng); }
    CMat operator()(const SphericalNearField& m) const {
      return spherical_channel(tx, rx, m.separation_wavelengths);
    }
    CMat operator()(const FarFieldRays& m) const {
      return farfield_channel(tx, rx, rng.uniform_int(m.min_rays, m.max_rays), rng);
    }
    CMat operator()(const RicianMixture& m) const {
      const CMat nf = spherical_channel(tx, rx, m.near_field.separation_wavelengths);
      const CMat ff = (*this)(m.far_field);
      return rician_mixture(nf, ff, m.kappa);
    }
  };
  return std::visit(Visitor{tx, rx, rng}, model);
}

CMat draw_error(int nr, int nt, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0)) throw Error("error bound must be nonnegative");
  CMat g = rng.complex_normal(nr, nt);
  if (epsilon == 0.0) return CMat::Zero(nr, nt);
  return g * (epsilon / g.norm());
}

CMat perturb(const CMat& h, const CMat& delta) {
  return h + std::sqrt(static_cast<double>(h.rows() * h.cols())) * delta;
}

CMat worst_case_error(const CMat& f_mat, const CMat& w_mat, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error("error bound must be nonnegative");
  const auto tw = top_singular(w_mat);
  const auto tf = top_singular(f_mat);
  if (tw.value == 0.0 || tf.value == 0.0) throw Error("worst-case error undefined for zero codebooks");
  if (epsilon == 0.0) return CMat::Zero(w_mat.rows(), f_mat.rows());
  return epsilon * tw.left * tf.left.adjoint();
}

UserChannel draw_user_channel(const ArrayGeometry& geometry, const DirectionGrid& region, Rng& rng) {
  UserChannel out;
  out.direction.azimuth = region.az_stop > region.az_start ? rng.uniform(region.az_start, region.az_stop) : region.az_start;
  out.direction.elevation = region.el_stop > region.el_start ? rng.uniform(region.el_start, region.el_stop) : region.el_start;
  out.gain = rng.complex_normal();
  out.entries = out.gain * array_response(geometry, out.direction);
  return out;
}

}  // namespace fdbeam
