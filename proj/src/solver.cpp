#include "fdbeam/solver.hpp"

#include <random>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "fdbeam/linalg.hpp"

namespace fdbeam {

namespace {

// The exact repair aims for a disc this much smaller than the true one so that aggregate
// coverage sums stay on the right side of their bound after rounding.
constexpr double kDiscShrink = 1e-10;

}  // namespace

BeamSubproblem::BeamSubproblem(CMat coupling, CVec steer, double g_tgt, double sigma, double rho)
    : coupling_(std::move(coupling)), steer_(std::move(steer)), g_tgt_(g_tgt), sigma_(sigma), rho_(rho) {
  if (steer_.size() == 0) throw Error("subproblem: empty steering vector");
  if (coupling_.cols() != steer_.size()) throw Error("subproblem: coupling columns must match steering length");
  if (!(g_tgt_ > 0.0) || !std::isfinite(g_tgt_)) throw Error("subproblem: gain target must be positive");
  if (!(sigma_ >= 0.0)) throw Error("subproblem: sigma must be nonnegative");
  if (!(rho_ >= 0.0)) throw Error("subproblem: rho must be nonnegative");
  const double l1 = steer_.cwiseAbs().sum();
  if (!(l1 > 0.0)) throw Error("subproblem: zero steering vector");
  if (g_tgt_ * (1.0 - sigma_) > l1) {
    throw InfeasibleError("gain target unreachable under |f_n| <= 1: g(1 - sigma) exceeds ||a||_1");
  }
}

double BeamSubproblem::gain_residual(const CVec& f) const {
  return std::max(0.0, std::abs(g_tgt_ - steer_.dot(f)) - sigma_ * g_tgt_);
}

double BeamSubproblem::box_residual(const CVec& f) const {
  return f.size() == 0 ? 0.0 : std::max(0.0, f.cwiseAbs().maxCoeff() - 1.0);
}

CVec BeamSubproblem::center() const {
  const double l1 = steer_.cwiseAbs().sum();
  const double t = std::min(1.0, g_tgt_ / l1);
  CVec c(steer_.size());
  for (Eigen::Index n = 0; n < steer_.size(); ++n) {
    const double m = std::abs(steer_[n]);
    c[n] = m > 0.0 ? t * steer_[n] / m : cd(t, 0.0);
  }
  return c;
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw Error("solver: max_iters must be positive");
  if (dykstra_iters < 1) throw Error("solver: dykstra_iters must be positive");
  if (!(feas_tol > 0.0) || !(obj_tol > 0.0)) throw Error("solver: tolerances must be positive");
}

CVec project_gain_disc(const CVec& f, const CVec& a, double g_tgt, double sigma) {
  const double a2 = a.squaredNorm();
  if (!(a2 > 0.0)) throw Error("gain disc projection: zero steering vector");
  const cd z = a.dot(f);
  const cd off = z - g_tgt;
  const double dist = std::abs(off);
  const double radius = sigma * g_tgt;
  if (dist <= radius) return f;
  const cd target = radius > 0.0 ? cd(g_tgt) + off * (radius / dist) : cd(g_tgt);
  return f + a * ((target - z) / a2);
}

CVec project_box(const CVec& f) {
  CVec out = f;
  for (Eigen::Index n = 0; n < out.size(); ++n) {
    const double m = std::abs(out[n]);
    if (m > 1.0) out[n] /= m;
  }
  return out;
}

namespace {

// Moves a disc-feasible point toward the centre until every entry fits in the box.
CVec repair(const CVec& f, const BeamSubproblem& p) {
  CVec f1 = project_gain_disc(f, p.steer(), p.g_tgt(), p.sigma() * (1.0 - kDiscShrink));
  if (f1.cwiseAbs().maxCoeff() <= 1.0) return f1;
  const CVec c = p.center();
  const CVec d = f1 - c;
  double theta = 1.0;
  for (Eigen::Index n = 0; n < d.size(); ++n) {
    if (std::abs(f1[n]) <= 1.0) continue;
    const double dd = std::norm(d[n]);
    const double b = (std::conj(c[n]) * d[n]).real();
    const double slack = std::max(0.0, 1.0 - std::norm(c[n]));
    const double root = (-b + std::sqrt(b * b + dd * slack)) / dd;
    theta = std::min(theta, root);
  }
  theta = std::clamp(theta, 0.0, 1.0);
  CVec out = c + theta * d;
  // Rounding can leave an entry a few ulps above one.
  return project_box(out);
}

}  // namespace

CVec project_feasible(const CVec& f, const BeamSubproblem& problem, int dykstra_iters) {
  if (f.size() != problem.size()) throw Error("projection: vector length does not match subproblem");
  if (problem.gain_residual(f) == 0.0 && problem.box_residual(f) == 0.0) return f;

  CVec x = f;
  CVec p = CVec::Zero(f.size());
  CVec q = CVec::Zero(f.size());
  for (int it = 0; it < dykstra_iters; ++it) {
    const CVec y = project_gain_disc(x + p, problem.steer(), problem.g_tgt(), problem.sigma());
    p = x + p - y;
    const CVec x_next = project_box(y + q);
    q = y + q - x_next;
    const double change = (x_next - x).norm();
    x = x_next;
    if (change <= 1e-15 * (1.0 + x.norm())) break;
  }
  return repair(x, problem);
}

namespace {

struct BestTracker {
  const BeamSubproblem& problem;
  double feas_tol;
  double obj_tol;
  CVec f;
  double objective = std::numeric_limits<double>::infinity();
  bool any = false;
  std::vector<double> history;

  // Ties within obj_tol keep the earlier candidate.
  void offer(const CVec& cand) {
    if (problem.gain_residual(cand) > feas_tol || problem.box_residual(cand) > feas_tol) return;
    const double obj = problem.objective(cand);
    if (!any || obj < objective - obj_tol * std::max(std::abs(objective), 1e-300)) {
      f = cand;
      objective = obj;
      any = true;
    }
    history.push_back(objective);
  }

  // Best objective improved by at most obj_tol (relative) over the last `window` offers.
  bool stalled(std::size_t window) const {
    if (!any || history.size() <= window) return false;
    const double old = history[history.size() - 1 - window];
    return old - objective <= obj_tol * objective;
  }
};

constexpr std::size_t kStallWindow = 50;

int run_squared(const BeamSubproblem& p, const SolverConfig& cfg, const CVec& x0, BestTracker& best, bool& stopped) {
  const CMat& m = p.coupling();
  const double smax = max_singular_value(m);
  if (smax == 0.0) {
    stopped = true;
    return 0;
  }
  const double step = 1.0 / (2.0 * smax * smax);
  CVec x = x0;
  CVec y = x0;
  double t = 1.0;
  double fx = (m * x).squaredNorm();
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const CVec grad = 2.0 * (m.adjoint() * (m * y));
    const CVec x_next = project_feasible(y - step * grad, p, cfg.dykstra_iters);
    const double f_next = (m * x_next).squaredNorm();
    best.offer(x_next);
    const double move = (x_next - y).norm();
    if (f_next > fx) {
      t = 1.0;
      y = x_next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_next + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    x = x_next;
    fx = f_next;
    if (move <= cfg.obj_tol * std::max(1.0, x.norm()) || best.stalled(kStallWindow)) {
      stopped = true;
      ++it;
      break;
    }
  }
  return it;
}

// Accelerated gradient on sqrt(||Mf||^2 + mu_m^2) + rho sqrt(||f||^2 + mu_f^2) with the
// smoothing shrunk stage by stage.
int run_smoothed(const BeamSubproblem& p, const SolverConfig& cfg, const CVec& x0, BestTracker& best, bool& stopped) {
  const CMat& m = p.coupling();
  const double rho = p.rho();
  const double smax = max_singular_value(m);
  const double root_n = std::sqrt(static_cast<double>(p.size()));
  const double scale_m = std::max(smax * root_n, 1e-300);
  const double scale_f = root_n;
  constexpr int kStages = 5;
  const int per_stage = std::max(1, cfg.max_iters / kStages);

  CVec x = x0;
  int total = 0;
  bool last_stage_stopped = false;
  for (int s = 0; s < kStages; ++s) {
    const double mu_rel = std::pow(10.0, -2.0 - s);
    const double mu_m = mu_rel * scale_m;
    const double mu_f = mu_rel * scale_f;
    const double lip = smax * smax / mu_m + rho / mu_f;
    const double step = 1.0 / lip;
    auto smooth = [&](const CVec& v) {
      return std::sqrt((m * v).squaredNorm() + mu_m * mu_m) + rho * std::sqrt(v.squaredNorm() + mu_f * mu_f);
    };
    CVec y = x;
    double t = 1.0;
    double fx = smooth(x);
    last_stage_stopped = false;
    for (int it = 0; it < per_stage; ++it) {
      const CVec my = m * y;
      CVec grad = (m.adjoint() * my) / std::sqrt(my.squaredNorm() + mu_m * mu_m);
      grad += rho * y / std::sqrt(y.squaredNorm() + mu_f * mu_f);
      const CVec x_next = project_feasible(y - step * grad, p, cfg.dykstra_iters);
      const double f_next = smooth(x_next);
      best.offer(x_next);
      ++total;
      const double move = (x_next - y).norm();
      if (f_next > fx) {
        t = 1.0;
        y = x_next;
      } else {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = x_next + ((t - 1.0) / t_next) * (x_next - x);
        t = t_next;
      }
      x = x_next;
      fx = f_next;
      if (move <= cfg.obj_tol * std::max(1.0, x.norm()) || best.stalled(kStallWindow)) {
        last_stage_stopped = true;
        break;
      }
    }
  }
  stopped = last_stage_stopped;
  return total;
}

int run_subgradient(const BeamSubproblem& p, const SolverConfig& cfg, const CVec& x0, BestTracker& best,
                    bool& stopped) {
  const CMat& m = p.coupling();
  const double scale = 0.5 * std::sqrt(static_cast<double>(p.size()));
  CVec x = x0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const CVec mx = m * x;
    CVec g = CVec::Zero(x.size());
    const double mxn = mx.norm();
    if (mxn > 0.0) g += m.adjoint() * mx / mxn;
    const double xn = x.norm();
    if (p.rho() > 0.0 && xn > 0.0) g += p.rho() * x / xn;
    const double gn = g.norm();
    if (gn == 0.0) {
      stopped = true;
      ++it;
      break;
    }
    x = project_feasible(x - (scale / std::sqrt(it + 1.0)) * (g / gn), p, cfg.dykstra_iters);
    best.offer(x);
    if (best.stalled(4 * kStallWindow)) {
      stopped = true;
      ++it;
      break;
    }
  }
  return it;
}

SolverResult finish(const BeamSubproblem& p, const CVec& f, int iterations, bool converged, double feas_tol) {
  SolverResult r;
  r.f = f;
  r.objective = p.objective(f);
  r.gain_residual = p.gain_residual(f);
  r.box_residual = p.box_residual(f);
  r.iterations = iterations;
  r.converged = converged && r.gain_residual <= feas_tol && r.box_residual <= feas_tol;
  return r;
}

}  // namespace

SolverResult solve_beam(const BeamSubproblem& problem, const SolverConfig& config) {
  config.validate();
  BestTracker best{problem, config.feas_tol, config.obj_tol, {}, std::numeric_limits<double>::infinity(), false, {}};

  CVec x0;
  if (config.warm_start) {
    if (config.warm_start->size() != problem.size()) throw Error("solver: warm start length mismatch");
    best.offer(*config.warm_start);
    x0 = project_feasible(*config.warm_start, problem, config.dykstra_iters);
  } else {
    x0 = problem.center();
  }
  best.offer(x0);

  bool stopped = false;
  int iters = 0;
  if (problem.coupling().size() == 0 && problem.rho() == 0.0) {
    stopped = true;
  } else if (config.step_rule == StepRule::diminishing) {
    iters = run_subgradient(problem, config, x0, best, stopped);
  } else if (problem.rho() == 0.0) {
    iters = run_squared(problem, config, x0, best, stopped);
  } else {
    iters = run_smoothed(problem, config, x0, best, stopped);
  }
  if (!best.any) {
    // Projection output always meets the constraints up to rounding; this only triggers
    // when the tolerance is tighter than that rounding.
    return finish(problem, x0, iters, false, config.feas_tol);
  }
  return finish(problem, best.f, iters, stopped, config.feas_tol);
}

namespace {

// Oracle coordinates: the free entry and the offset z - g of z = a^H f, as four reals.
using OracleParams = Eigen::Vector4d;

}  // namespace

SolverResult oracle_solve(const BeamSubproblem& problem, double mag_step, double phase_step_deg) {
  const Eigen::Index n = problem.size();
  if (n > 2) throw Error("oracle_solve supports at most two elements");
  if (!(mag_step > 0.0 && mag_step <= 1.0) || !(phase_step_deg > 0.0)) throw Error("oracle_solve: bad grid");

  const CVec& a = problem.steer();
  const double g = problem.g_tgt();
  const double radius = problem.sigma() * g;
  // Solve for the entry with the larger steering magnitude; grid the other one.
  const Eigen::Index piv = (n == 2 && std::abs(a[1]) > std::abs(a[0])) ? 1 : 0;
  const Eigen::Index free = n == 2 ? 1 - piv : -1;

  auto build = [&](const OracleParams& q, CVec& f) {
    f.resize(n);
    if (std::hypot(q[2], q[3]) > radius) return false;
    cd rest = g + cd(q[2], q[3]);
    if (free >= 0) {
      f[free] = cd(q[0], q[1]);
      if (std::abs(f[free]) > 1.0) return false;
      rest -= std::conj(a[free]) * f[free];
    }
    if (std::abs(a[piv]) == 0.0) return false;
    f[piv] = rest / std::conj(a[piv]);
    return std::abs(f[piv]) <= 1.0;
  };

  CVec f;
  std::vector<std::pair<double, OracleParams>> top;
  constexpr std::size_t kKeep = 6;
  auto consider = [&](const OracleParams& q) {
    if (!build(q, f)) return;
    const double obj = problem.objective(f);
    if (top.size() < kKeep || obj < top.back().first) {
      top.emplace_back(obj, q);
      std::sort(top.begin(), top.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
      if (top.size() > kKeep) top.pop_back();
    }
  };

  const double dphi = deg2rad(phase_step_deg);
  const int n_phase = std::max(1, static_cast<int>(std::round(360.0 / phase_step_deg)));
  const int n_mag = static_cast<int>(std::round(1.0 / mag_step));
  const int n_s = radius > 0.0 ? 10 : 0;
  long evaluations = 0;
  for (int is = 0; is <= n_s; ++is) {
    const double s = n_s > 0 ? radius * is / n_s : 0.0;
    const int n_psi = is == 0 ? 1 : n_phase;
    for (int ip = 0; ip < n_psi; ++ip) {
      const double psi = ip * dphi;
      const cd off = std::polar(s, psi);
      if (free < 0) {
        consider(OracleParams(0.0, 0.0, off.real(), off.imag()));
        ++evaluations;
        continue;
      }
      for (int ir = 0; ir <= n_mag; ++ir) {
        const double r = std::min(1.0, ir * mag_step);
        const int n_phi = ir == 0 ? 1 : n_phase;
        for (int iq = 0; iq < n_phi; ++iq) {
          const cd x = std::polar(r, iq * dphi);
          consider(OracleParams(x.real(), x.imag(), off.real(), off.imag()));
          ++evaluations;
        }
      }
    }
  }
  if (top.empty()) throw InfeasibleError("oracle_solve: no feasible grid point");

  // Shrinking pattern search in Cartesian coordinates. Besides the coordinate axes it polls
  // a fixed set of pseudo-random directions, which keeps it moving along the nonsmooth
  // ridge M f = 0 where axis-only polling stalls.
  Eigen::Vector4d mask(free >= 0 ? 1.0 : 0.0, free >= 0 ? 1.0 : 0.0, radius > 0.0 ? 1.0 : 0.0,
                       radius > 0.0 ? 1.0 : 0.0);
  std::vector<Eigen::Vector4d> dirs;
  for (int k = 0; k < 4; ++k) {
    if (mask[k] == 0.0) continue;
    dirs.push_back(Eigen::Vector4d::Unit(k));
    dirs.push_back(-Eigen::Vector4d::Unit(k));
  }
  std::mt19937_64 gen(0x0AC1E);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 120; ++k) {
    Eigen::Vector4d d(normal(gen), normal(gen), normal(gen), normal(gen));
    d = d.cwiseProduct(mask);
    if (d.norm() > 0.0) dirs.push_back(d.normalized());
  }

  double best_obj = std::numeric_limits<double>::infinity();
  OracleParams best_q = top.front().second;
  for (const auto& [obj0, q0] : top) {
    OracleParams q = q0;
    double obj = obj0;
    double h = mag_step;
    while (h > 1e-11) {
      OracleParams best_nb = q;
      double best_nb_obj = obj;
      for (const auto& d : dirs) {
        const OracleParams cand = q + h * d;
        ++evaluations;
        if (!build(cand, f)) continue;
        const double cobj = problem.objective(f);
        if (cobj < best_nb_obj) {
          best_nb_obj = cobj;
          best_nb = cand;
        }
      }
      if (best_nb_obj < obj) {
        q = best_nb;
        obj = best_nb_obj;
        h *= 2.0;
      } else {
        h *= 0.5;
      }
    }
    if (obj < best_obj) {
      best_obj = obj;
      best_q = q;
    }
  }
  build(best_q, f);
  return finish(problem, f, static_cast<int>(std::min<long>(evaluations, std::numeric_limits<int>::max())), true,
                std::numeric_limits<double>::infinity());
}

}  // namespace fdbeam
