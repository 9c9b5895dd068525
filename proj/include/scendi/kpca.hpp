#pragma once

// Kernel-PCA cluster assignment: each sample goes to the top eigendirection
// on which it has the largest squared loading.

#include <string>
#include <vector>

#include "scendi/covariance.hpp"
#include "scendi/embed_edit.hpp"

namespace scendi {

struct ClusterAssignment {
  std::vector<int> labels;  // in [0, m)
  Matrix scores;            // n x m squared loadings
  Vector eigenvalues;       // top m, descending
  std::string warning;      // set when the spectrum is degenerate

  int cluster_count() const { return static_cast<int>(eigenvalues.size()); }
};

/// Clusters from the eigenvectors of (1/n) Phi Phi^T, optionally
/// double-centered.
ClusterAssignment kpca_clusters(const FeatureMatrix& phi, int m, bool center = false);

/// Same on arbitrary (not necessarily unit-norm) rows.
ClusterAssignment kpca_clusters_rows(const Matrix& rows, int m, bool center = false);

enum class SchurPart { kModel, kText };

/// Clusters of the model-driven (Lambda_I) or prompt-driven (Lambda_T)
/// component. Samples are loaded through their residual phi(x_I) - G phi(x_T)
/// (model) or G phi(x_T) (text). G is Gamma* of this corpus unless a
/// modifier fitted elsewhere is supplied, in which case the component is the
/// covariance of those loading vectors.
ClusterAssignment schur_clusters(const FeatureMatrix& image, const FeatureMatrix& text, int m,
                                 SchurPart which, const DecomposeOptions& opts = {},
                                 const Modifier* reference = nullptr);

/// Best label agreement over all bijections between cluster ids, in [0, 1].
/// Both label vectors must use ids below `k` (k <= 8).
double label_agreement(const std::vector<int>& a, const std::vector<int>& b, int k);

/// {labels, eigenvalues, top-3 loadings per sample, warning}.
std::string clusters_to_json(const ClusterAssignment& c, int indent = 2);

}  // namespace scendi
