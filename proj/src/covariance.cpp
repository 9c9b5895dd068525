#include "scendi/covariance.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scendi {

namespace {

Matrix scaled_cross(const Matrix& a, const Matrix& b, Eigen::Index n) {
  Matrix out(a.cols(), b.cols());
  out.noalias() = a.transpose() * b;
  out /= static_cast<double>(n);
  return out;
}

Matrix symmetrized(const Matrix& m) { return (m + m.transpose()) * 0.5; }

void require_square_blocks(const CovarianceBlocks& b) {
  const Eigen::Index d = b.c_ii.rows();
  if (b.c_ii.cols() != d || b.c_tt.rows() != d || b.c_tt.cols() != d ||
      b.c_it.rows() != d || b.c_it.cols() != d) {
    throw ValidationError("covariance blocks have inconsistent shapes", "shape");
  }
  if (!b.c_ii.allFinite() || !b.c_it.allFinite() || !b.c_tt.allFinite()) {
    throw ValidationError("covariance blocks have non-finite entries", "non_finite");
  }
}

// Kept singular triplets of Phi_T / sqrt(n): C_TT = V S^2 V^T restricted to
// s_k^2 > rel_cutoff * s_1^2.
struct TextRange {
  Matrix u;
  Vector s;
  Matrix v;
};

TextRange text_range(const FeatureMatrix& text, double rel_cutoff) {
  const Matrix scaled = text.rows / std::sqrt(static_cast<double>(text.n()));
  Eigen::BDCSVD<Matrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Eigen::Index k = 0;
  if (sv.size() && sv(0) > 0.0) {
    const double cut = rel_cutoff * sv(0) * sv(0);
    while (k < sv.size() && sv(k) * sv(k) > cut) ++k;
  }
  return {svd.matrixU().leftCols(k), sv.head(k), svd.matrixV().leftCols(k)};
}

void finish(SchurDecomposition& out, const DecomposeOptions& opts) {
  const Vector raw_i = eigvalsh(out.lambda_i);
  const Vector raw_t = eigvalsh(out.lambda_t);
  out.raw_min_i = raw_i.size() ? raw_i.minCoeff() : 0.0;
  out.raw_min_t = raw_t.size() ? raw_t.minCoeff() : 0.0;

  // The two parts sum to C_II, so the larger of their top eigenvalues is
  // within a factor of two of lambda_max(C_II); use it as the clamp scale so
  // an all-roundoff part is judged against the size of the whole.
  const double scale = std::max({raw_i.size() ? raw_i(0) : 0.0,
                                 raw_t.size() ? raw_t(0) : 0.0, 0.0});
  try {
    out.spectrum_i = clamp_psd(raw_i, opts.psd_tol, scale);
    out.spectrum_t = clamp_psd(raw_t, opts.psd_tol, scale);
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "Schur decomposition is not PSD (min eigenvalues: model " << out.raw_min_i
       << ", text " << out.raw_min_t << "): " << e.what();
    throw NumericalError(os.str(), "psd_violation");
  }
  out.trace_i = out.spectrum_i.sum();
  out.trace_t = out.spectrum_t.sum();
}

}  // namespace

Matrix CovarianceBlocks::joint() const {
  const Eigen::Index d = dim();
  Matrix out(2 * d, 2 * d);
  out << c_ii, c_it, c_it.transpose(), c_tt;
  return out;
}

void require_paired(const FeatureMatrix& image, const FeatureMatrix& text) {
  if (image.n() != text.n() || image.dim() != text.dim()) {
    std::ostringstream os;
    os << "image features are " << image.n() << "x" << image.dim()
       << " but text features are " << text.n() << "x" << text.dim();
    throw ValidationError(os.str(), "pairing");
  }
}

CovarianceBlocks blocks(const FeatureMatrix& image, const FeatureMatrix& text) {
  require_paired(image, text);
  validate_features(image);
  validate_features(text);
  const Eigen::Index n = image.n();
  CovarianceBlocks b;
  b.n = n;
  b.c_ii = symmetrized(scaled_cross(image.rows, image.rows, n));
  b.c_it = scaled_cross(image.rows, text.rows, n);
  b.c_tt = symmetrized(scaled_cross(text.rows, text.rows, n));
  return b;
}

Matrix gamma_star(const CovarianceBlocks& b, const DecomposeOptions& opts) {
  require_square_blocks(b);
  if (opts.ridge < 0.0) throw ValidationError("ridge must be non-negative", "config");
  Matrix c_tt = b.c_tt;
  if (opts.ridge > 0.0) c_tt.diagonal().array() += opts.ridge;
  const Matrix pinv = pseudoinverse(c_tt, opts.rel_cutoff);
  Matrix g(b.dim(), b.dim());
  g.noalias() = b.c_it * pinv;
  return g;
}

SchurDecomposition schur_decompose(const CovarianceBlocks& b, const DecomposeOptions& opts) {
  SchurDecomposition out;
  out.gamma_star = gamma_star(b, opts);
  Matrix lt(b.dim(), b.dim());
  lt.noalias() = out.gamma_star * b.c_it.transpose();
  out.lambda_t = symmetrized(lt);
  out.lambda_i = symmetrized(b.c_ii - out.lambda_t);
  finish(out, opts);
  return out;
}

Matrix gamma_star(const FeatureMatrix& image, const FeatureMatrix& text,
                  const DecomposeOptions& opts) {
  if (opts.ridge != 0.0) return gamma_star(blocks(image, text), opts);
  require_paired(image, text);
  validate_features(image);
  validate_features(text);
  const TextRange r = text_range(text, opts.rel_cutoff);
  const Matrix b = image.rows.transpose() * r.u / std::sqrt(static_cast<double>(image.n()));
  Matrix g(image.dim(), text.dim());
  g.noalias() = b * r.s.cwiseInverse().asDiagonal() * r.v.transpose();
  return g;
}

SchurDecomposition schur_decompose(const FeatureMatrix& image, const FeatureMatrix& text,
                                   const DecomposeOptions& opts) {
  const CovarianceBlocks cov = blocks(image, text);
  if (opts.ridge != 0.0) return schur_decompose(cov, opts);
  const TextRange r = text_range(text, opts.rel_cutoff);
  Matrix b(image.dim(), r.u.cols());
  b.noalias() = image.rows.transpose() * r.u;
  b /= std::sqrt(static_cast<double>(image.n()));

  SchurDecomposition out;
  out.gamma_star.noalias() = b * r.s.cwiseInverse().asDiagonal() * r.v.transpose();
  out.lambda_t.noalias() = b * b.transpose();
  out.lambda_t = symmetrized(out.lambda_t);
  out.lambda_i = symmetrized(cov.c_ii - out.lambda_t);
  finish(out, opts);
  return out;
}

double regression_objective(const FeatureMatrix& image, const FeatureMatrix& text,
                            const Matrix& gamma) {
  require_paired(image, text);
  if (gamma.rows() != image.dim() || gamma.cols() != text.dim()) {
    throw ValidationError("gamma has the wrong shape", "shape");
  }
  return residuals(image.rows, text.rows, gamma).squaredNorm() /
         static_cast<double>(image.n());
}

}  // namespace scendi
