#pragma once

#include <variant>

#include "fdbeam/geometry.hpp"
#include "fdbeam/random.hpp"

namespace fdbeam {

// Self-interference channel models. H is Nr x Nt throughout.
struct RayleighModel {};

struct SphericalNearField {
  double separation_wavelengths = 10.0;  // rx array offset along +y from the tx array
};

struct FarFieldRays {
  // Ray count drawn uniformly from [min_rays, max_rays] per realization.
  int min_rays = 1;
  int max_rays = 15;
};

struct RicianMixture {
  double kappa = 1.0;  // linear near-field to far-field power ratio
  SphericalNearField near_field;
  FarFieldRays far_field;
};

using SIChannelModel = std::variant<RayleighModel, SphericalNearField, FarFieldRays, RicianMixture>;

std::string model_name(const SIChannelModel& model);

// i.i.d. CN(0,1) entries; normalized only in expectation.
CMat draw_rayleigh(int nr, int nt, Rng& rng);

// [H]_{m,n} = (gamma / r_{n,m}) exp(-j 2 pi r_{n,m}) with distances in wavelengths and gamma
// chosen so ||H||_F^2 = Nt Nr. The rx array sits at tx.origin + separation * y_hat.
CMat spherical_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, double separation_wavelengths);

// sqrt(1/n_rays) sum_u beta_u a_rx(theta_u) a_tx(phi_u)^H, beta_u ~ CN(0,1), angles
// U(-pi/2, pi/2) in azimuth and elevation, then normalized to ||H||_F^2 = Nt Nr.
CMat farfield_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, int n_rays, Rng& rng);

// sqrt(kappa/(kappa+1)) H_nf + sqrt(1/(kappa+1)) H_ff.
CMat rician_mixture(const CMat& h_nf, const CMat& h_ff, double kappa);

// One realization of any model.
CMat draw_channel(const SIChannelModel& model, const ArrayGeometry& tx, const ArrayGeometry& rx, Rng& rng);

// Scales H so that ||H||_F^2 = Nt Nr.
void normalize_frobenius(CMat& h);

// Delta = epsilon G / ||G||_F with G ~ CN(0,1): ||Delta||_F == epsilon.
CMat draw_error(int nr, int nt, double epsilon, Rng& rng);

// H + sqrt(Nt Nr) Delta.
CMat perturb(const CMat& h, const CMat& delta);

// Rank-one error epsilon u v^H maximizing ||W^H Delta F||_F over ||Delta||_F <= epsilon:
// u is the dominant left singular vector of W, v that of F.
CMat worst_case_error(const CMat& f_mat, const CMat& w_mat, double epsilon);

struct UserChannel {
  CVec entries;
  Direction direction;
  cd gain;
};

// LOS user: direction uniform over the region extents, gain ~ CN(0,1).
UserChannel draw_user_channel(const ArrayGeometry& geometry, const DirectionGrid& region, Rng& rng);

}  // namespace fdbeam
