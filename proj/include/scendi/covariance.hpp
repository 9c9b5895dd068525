#pragma once

// Joint image/text kernel covariance and its Schur-complement split of the
// image block into a prompt-driven part (explained linearly by the text
// features) and a model-driven remainder.

#include <optional>

#include "scendi/kernels.hpp"
#include "scendi/spectral.hpp"

namespace scendi {

struct CovarianceBlocks {
  Matrix c_ii;  // (1/n) Phi_I^T Phi_I
  Matrix c_it;  // (1/n) Phi_I^T Phi_T
  Matrix c_tt;  // (1/n) Phi_T^T Phi_T
  Eigen::Index n = 0;

  Eigen::Index dim() const { return c_ii.rows(); }
  /// [[C_II, C_IT], [C_IT^T, C_TT]].
  Matrix joint() const;
};

struct DecomposeOptions {
  double rel_cutoff = kDefaultRelCutoff;
  /// Optional ridge added to C_TT before pseudoinversion.
  double ridge = 0.0;
  double psd_tol = kDefaultPsdTol;
};

struct SchurDecomposition {
  Matrix lambda_i;    // model-driven component, C_II - lambda_t
  Matrix lambda_t;    // prompt-driven component, C_IT C_TT^+ C_IT^T
  Matrix gamma_star;  // C_IT C_TT^+
  Vector spectrum_i;  // clamped eigenvalues of lambda_i, descending
  Vector spectrum_t;  // clamped eigenvalues of lambda_t, descending
  double raw_min_i = 0.0;  // smallest eigenvalue of lambda_i before clamping
  double raw_min_t = 0.0;
  double trace_i = 0.0;  // sum of spectrum_i
  double trace_t = 0.0;
};

/// Checks that the two feature matrices describe the same n pairs in the same
/// feature space.
void require_paired(const FeatureMatrix& image, const FeatureMatrix& text);

CovarianceBlocks blocks(const FeatureMatrix& image, const FeatureMatrix& text);

/// C_IT (C_TT + ridge I)^+; the least-squares map from text to image features.
Matrix gamma_star(const CovarianceBlocks& b, const DecomposeOptions& opts = {});

SchurDecomposition schur_decompose(const CovarianceBlocks& b,
                                   const DecomposeOptions& opts = {});

/// Same quantities computed from the feature rows, applying C_TT^+ through a
/// thin SVD of Phi_T / sqrt(n). With a ridge this defers to the block form.
Matrix gamma_star(const FeatureMatrix& image, const FeatureMatrix& text,
                  const DecomposeOptions& opts = {});
SchurDecomposition schur_decompose(const FeatureMatrix& image, const FeatureMatrix& text,
                                   const DecomposeOptions& opts = {});

/// Least-squares objective (1/n) |Phi_I^T - Gamma Phi_T^T|_F^2.
double regression_objective(const FeatureMatrix& image, const FeatureMatrix& text,
                            const Matrix& gamma);

/// Residual rows phi(x_I) - Gamma phi(x_T).
template <typename GammaT>
Matrix residuals(const Matrix& image_rows, const Matrix& text_rows,
                 const Eigen::MatrixBase<GammaT>& gamma) {
  return image_rows - text_rows * gamma.transpose();
}

}  // namespace scendi
