#pragma once

// Explicit feature maps for the two normalized kernels: cosine similarity
// (unit-normalized embeddings) and the Gaussian kernel through paired
// cos/sin random Fourier features.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "scendi/spectral.hpp"

namespace scendi {

enum class KernelKind { kCosine, kGaussian };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

/// Row-per-sample raw embeddings, e.g. encoder outputs.
using EmbeddingMatrix = Matrix;

struct KernelConfig {
  KernelKind kind = KernelKind::kCosine;
  /// Bandwidth; unset means "median heuristic on the image embeddings".
  std::optional<double> sigma;
  /// Total feature dimension r (r/2 frequencies). Must be even.
  int rff_dim = 2000;
  std::uint64_t seed = 0;
  /// Unit-normalize raw embeddings before the Gaussian map.
  bool normalize_input = false;

  void validate() const;
  bool operator==(const KernelConfig&) const = default;
};

/// Kernel features: one unit-norm row per sample.
struct FeatureMatrix {
  Matrix rows;
  KernelConfig config;

  Eigen::Index n() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

/// Rejects empty matrices, non-finite entries and zero rows.
void validate_embeddings(const EmbeddingMatrix& e, std::string_view what = "embedding");

/// Checks the unit-row invariant of a FeatureMatrix within `tol`.
void validate_features(const FeatureMatrix& phi, double tol = 1e-9);

FeatureMatrix cosine_features(const EmbeddingMatrix& e);

/// Frequencies of a Gaussian random Fourier map, drawn once and shared by
/// every modality mapped with it.
class RffMap {
 public:
  /// `sigma` must be resolved (positive) at this point.
  RffMap(Eigen::Index input_dim, double sigma, int rff_dim, std::uint64_t seed);

  Eigen::Index input_dim() const { return omega_.rows(); }
  Eigen::Index feature_dim() const { return 2 * omega_.cols(); }
  double sigma() const { return sigma_; }
  const Matrix& frequencies() const { return omega_; }

  /// Row i of the result is sqrt(1/D) [cos(w_1.x_i), sin(w_1.x_i), ...].
  Matrix map(const EmbeddingMatrix& e) const;

 private:
  Matrix omega_;  // input_dim x D
  double sigma_;
};

/// Median pairwise Euclidean distance between rows.
double median_pairwise_distance(const EmbeddingMatrix& e);

/// Fills in sigma from the median heuristic on `reference` when unset.
KernelConfig resolve_sigma(const KernelConfig& cfg, const EmbeddingMatrix& reference);

/// Gaussian features; cfg.kind must be gaussian and cfg.sigma resolved.
FeatureMatrix rff_features(const EmbeddingMatrix& e, const KernelConfig& cfg);

/// Dispatch on cfg.kind. For the Gaussian kernel cfg.sigma must be set.
FeatureMatrix features(const EmbeddingMatrix& e, const KernelConfig& cfg);

/// Features for a paired corpus. The Gaussian bandwidth, when unset, is
/// resolved from the image embeddings and both modalities share one map.
struct PairedFeatures {
  FeatureMatrix image;
  FeatureMatrix text;
};
PairedFeatures paired_features(const EmbeddingMatrix& image,
                               const EmbeddingMatrix& text,
                               const KernelConfig& cfg);

/// Phi Phi^T.
Matrix gram(const FeatureMatrix& phi);

/// Exact Gaussian kernel exp(-|x - y|^2 / (2 sigma^2)).
template <typename A, typename B>
double gaussian_kernel(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y,
                       double sigma) {
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

}  // namespace scendi
