#pragma once

// Symmetric-matrix primitives shared by every score: eigendecomposition with
// a fixed ordering and sign convention, PSD clamping, spectral pseudoinverse
// and the von Neumann entropy of a spectrum.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

#include "scendi/error.hpp"

namespace scendi {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Absolute per-entry tolerance for accepting a matrix as symmetric.
inline constexpr double kSymmetryTol = 1e-9;
/// Default relative band for treating negative eigenvalues as roundoff.
inline constexpr double kDefaultPsdTol = 1e-9;
/// Default relative cutoff below which eigenvalues are not inverted.
inline constexpr double kDefaultRelCutoff = 1e-10;

template <typename Scalar>
struct EigenSystem {
  VectorX<Scalar> values;   // descending
  MatrixX<Scalar> vectors;  // column j pairs with values(j)
};

namespace detail {

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << "expected a square matrix, got " << a.rows() << "x" << a.cols();
    throw ValidationError(os.str(), "shape");
  }
  if (!a.allFinite()) {
    throw ValidationError("matrix has non-finite entries", "non_finite");
  }
  const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (a.size() > 0 && asym > Scalar(kSymmetryTol)) {
    std::ostringstream os;
    os << "matrix is not symmetric (max |A - A^T| = " << asym << ")";
    throw ValidationError(os.str(), "not_symmetric");
  }
}

// Flip each eigenvector so that its first entry that is not negligibly small
// is positive.
template <typename Scalar>
void canonicalize_signs(MatrixX<Scalar>& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const Scalar scale = v.col(j).cwiseAbs().maxCoeff();
    const Scalar eps = scale * Scalar(1e-12);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > eps) {
        if (v(i, j) < Scalar(0)) v.col(j) = -v.col(j);
        break;
      }
    }
  }
}

}  // namespace detail

/// Eigendecomposition of a symmetric matrix. Values are returned in
/// descending order; each eigenvector has its first nonzero component
/// positive.
template <typename Derived>
EigenSystem<typename Derived::Scalar> eigh(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  detail::require_symmetric(a);
  const Eigen::Index n = a.rows();
  EigenSystem<Scalar> out;
  if (n == 0) return out;

  // Solve on the exactly symmetric part so the lower-triangle read by the
  // solver does not depend on which side carries the roundoff.
  const MatrixX<Scalar> sym = (a + a.transpose()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge",
                         "eigen_convergence");
  }
  // Eigen returns ascending order.
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  detail::canonicalize_signs(out.vectors);
  return out;
}

/// Eigenvalues only, descending.
template <typename Derived>
VectorX<typename Derived::Scalar> eigvalsh(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  detail::require_symmetric(a);
  if (a.rows() == 0) return {};
  const MatrixX<Scalar> sym = (a + a.transpose()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge",
                         "eigen_convergence");
  }
  return solver.eigenvalues().reverse();
}

/// Zero out negative eigenvalues that lie within the roundoff band
/// [-rel_tol * scale, 0). `scale` defaults to the largest value (or 0).
/// Anything more negative is a genuine PSD violation.
template <typename Scalar>
VectorX<Scalar> clamp_psd(const VectorX<Scalar>& values,
                          Scalar rel_tol = Scalar(kDefaultPsdTol),
                          Scalar scale = Scalar(-1)) {
  if (scale < Scalar(0)) {
    scale = values.size() > 0 ? std::max(values.maxCoeff(), Scalar(0)) : Scalar(0);
  }
  const Scalar floor = -rel_tol * scale;
  VectorX<Scalar> out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) >= Scalar(0)) continue;
    if (out(i) < floor) {
      std::ostringstream os;
      os.precision(17);
      os << "eigenvalue " << out(i) << " at index " << i
         << " is below the PSD band (floor " << floor << ")";
      throw NumericalError(os.str(), "psd_violation");
    }
    out(i) = Scalar(0);
  }
  return out;
}

/// Spectral Moore-Penrose pseudoinverse of a PSD matrix. Eigenvalues at or
/// below rel_cutoff * lambda_max are dropped; the zero matrix maps to itself.
template <typename Derived>
MatrixX<typename Derived::Scalar> pseudoinverse(
    const Eigen::MatrixBase<Derived>& a,
    typename Derived::Scalar rel_cutoff =
        typename Derived::Scalar(kDefaultRelCutoff)) {
  using Scalar = typename Derived::Scalar;
  const auto es = eigh(a);
  const Eigen::Index n = a.rows();
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(n, n);
  if (n == 0) return out;
  const Scalar top = es.values(0);
  if (!(top > Scalar(0))) return out;
  const Scalar cut = rel_cutoff * top;
  VectorX<Scalar> inv = VectorX<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (es.values(i) > cut) inv(i) = Scalar(1) / es.values(i);
  }
  out.noalias() = es.vectors * inv.asDiagonal() * es.vectors.transpose();
  return (out + out.transpose()) * Scalar(0.5);
}

/// Von Neumann entropy sum_i l_i log(1/l_i) in nats, with 0 log(1/0) = 0.
template <typename Derived>
typename Derived::Scalar matrix_entropy(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  Scalar h = Scalar(0);
  Scalar total = Scalar(0);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Scalar l = values(i);
    if (l < Scalar(0) || !std::isfinite(l)) {
      std::ostringstream os;
      os << "entropy input " << l << " at index " << i
         << " is negative or non-finite";
      throw ValidationError(os.str(), "negative_spectrum");
    }
    total += l;
    if (l > Scalar(0)) h -= l * std::log(l);
  }
  if (total > Scalar(1) + Scalar(1e-8)) {
    std::ostringstream os;
    os << "entropy input sums to " << total << " > 1";
    throw ValidationError(os.str(), "spectrum_mass");
  }
  return h;
}

}  // namespace scendi
