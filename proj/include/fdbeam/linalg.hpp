#pragma once

#include <cmath>

#include "fdbeam/types.hpp"

namespace fdbeam {

template <typename Scalar>
struct SingularTriplet {
  Scalar value = 0;
  CVector<Scalar> left;   // unit vector in the column space
  CVector<Scalar> right;  // unit vector in the row space
};

// Dominant singular triplet by power iteration on A^H A. The start vector is the column
// of A^H with the largest norm, which keeps the result deterministic and avoids starting
// orthogonal to the dominant subspace in all but contrived cases.
template <typename Derived>
SingularTriplet<typename Eigen::NumTraits<typename Derived::Scalar>::Real> top_singular(
    const Eigen::MatrixBase<Derived>& a, double tol = 1e-13, int max_iters = 5000) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using Vec = CVector<Real>;
  SingularTriplet<Real> out;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  out.left = Vec::Zero(rows);
  out.right = Vec::Zero(cols);
  if (rows == 0 || cols == 0) return out;

  Eigen::Index best_row = 0;
  a.rowwise().squaredNorm().maxCoeff(&best_row);
  if (a.row(best_row).squaredNorm() == Real(0)) return out;
  Vec v = a.row(best_row).adjoint();
  v.normalize();
  // Mix in a fixed deterministic perturbation so that a start orthogonal to the
  // dominant right singular vector does not stall.
  for (Eigen::Index k = 0; k < cols; ++k) {
    v[k] += std::complex<Real>(Real(1e-3) * std::cos(Real(0.7) * Real(k + 1)), Real(1e-3) * std::sin(Real(1.3) * Real(k + 1)));
  }
  v.normalize();

  Real sigma = 0;
  for (int it = 0; it < max_iters; ++it) {
    Vec u = a * v;
    const Real un = u.norm();
    if (un == Real(0)) break;
    u /= un;
    Vec w = a.adjoint() * u;
    const Real wn = w.norm();
    if (wn == Real(0)) break;
    const Vec next = w / wn;
    const Real change = (next - v).norm();
    v = next;
    const Real prev = sigma;
    sigma = wn;
    if (it > 2 && change < Real(tol) && std::abs(sigma - prev) <= Real(tol) * sigma) break;
  }
  Vec u = a * v;
  out.value = u.norm();
  if (out.value > Real(0)) u /= out.value;
  out.left = u;
  out.right = v;
  return out;
}

// Largest singular value from the eigenvalues of the smaller Gram matrix. Used where an
// upper bound on the curvature is needed and power iteration could stop short.
template <typename Derived>
auto max_singular_value(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.rows() == 0 || a.cols() == 0) return Real(0);
  const Mat gram = a.rows() <= a.cols() ? Mat(a * a.adjoint()) : Mat(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(Real(0), eig.eigenvalues().maxCoeff()));
}

// Spectral norm ||A||_2 via power iteration.
template <typename Derived>
auto spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  return top_singular(a).value;
}

}  // namespace fdbeam
