#include "scendi/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace scendi {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kCosine:
      return "cosine";
    case KernelKind::kGaussian:
      return "gaussian";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "cosine") return KernelKind::kCosine;
  if (name == "gaussian") return KernelKind::kGaussian;
  throw ValidationError("unknown kernel '" + std::string(name) + "'", "config");
}

void KernelConfig::validate() const {
  if (kind != KernelKind::kGaussian) return;
  if (rff_dim <= 0 || rff_dim % 2 != 0) {
    throw ValidationError("rff_dim must be a positive even integer, got " +
                              std::to_string(rff_dim),
                          "config");
  }
  if (sigma && !(*sigma > 0.0 && std::isfinite(*sigma))) {
    throw ValidationError("sigma must be positive and finite", "config");
  }
}

void validate_embeddings(const EmbeddingMatrix& e, std::string_view what) {
  if (e.rows() == 0 || e.cols() == 0) {
    throw ValidationError(std::string(what) + " matrix is empty", "shape");
  }
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    if (!e.row(i).allFinite()) {
      throw ValidationError(std::string(what) + " row " + std::to_string(i) +
                                " has non-finite entries",
                            "non_finite");
    }
    if (e.row(i).squaredNorm() == 0.0) {
      throw ValidationError(std::string(what) + " row " + std::to_string(i) +
                                " is zero",
                            "zero_row");
    }
  }
}

void validate_features(const FeatureMatrix& phi, double tol) {
  if (phi.n() == 0 || phi.dim() == 0) {
    throw ValidationError("feature matrix is empty", "shape");
  }
  if (!phi.rows.allFinite()) {
    throw ValidationError("feature matrix has non-finite entries", "non_finite");
  }
  for (Eigen::Index i = 0; i < phi.n(); ++i) {
    const double norm = phi.rows.row(i).norm();
    if (std::abs(norm - 1.0) > tol) {
      std::ostringstream os;
      os << "feature row " << i << " has norm " << norm << ", expected 1";
      throw ValidationError(os.str(), "not_normalized");
    }
  }
}

FeatureMatrix cosine_features(const EmbeddingMatrix& e) {
  validate_embeddings(e);
  FeatureMatrix out;
  out.config.kind = KernelKind::kCosine;
  out.rows = e.rowwise().normalized();
  return out;
}

RffMap::RffMap(Eigen::Index input_dim, double sigma, int rff_dim,
               std::uint64_t seed)
    : sigma_(sigma) {
  if (input_dim <= 0) throw ValidationError("RFF input dimension must be positive", "config");
  if (rff_dim <= 0 || rff_dim % 2 != 0) {
    throw ValidationError("rff_dim must be a positive even integer, got " +
                              std::to_string(rff_dim),
                          "config");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("sigma must be positive and finite", "config");
  }
  const Eigen::Index freqs = rff_dim / 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / sigma);
  omega_.resize(input_dim, freqs);
  // Column-by-column so frequency j does not depend on later ones.
  for (Eigen::Index j = 0; j < freqs; ++j) {
    for (Eigen::Index i = 0; i < input_dim; ++i) omega_(i, j) = normal(rng);
  }
}

Matrix RffMap::map(const EmbeddingMatrix& e) const {
  if (e.cols() != input_dim()) {
    std::ostringstream os;
    os << "RFF map expects " << input_dim() << "-dim inputs, got " << e.cols();
    throw ValidationError(os.str(), "shape");
  }
  const Eigen::Index freqs = omega_.cols();
  const Matrix proj = e * omega_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(freqs));
  Matrix out(e.rows(), 2 * freqs);
  for (Eigen::Index j = 0; j < freqs; ++j) {
    out.col(2 * j) = proj.col(j).array().cos() * scale;
    out.col(2 * j + 1) = proj.col(j).array().sin() * scale;
  }
  return out;
}

double median_pairwise_distance(const EmbeddingMatrix& e) {
  const Eigen::Index n = e.rows();
  if (n < 2) throw ValidationError("median heuristic needs at least two samples", "shape");
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d.push_back((e.row(i) - e.row(j)).norm());
  }
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double med = d[mid];
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (med + lower);
  }
  if (!(med > 0.0)) {
    throw ValidationError("median pairwise distance is zero; pass an explicit sigma",
                          "config");
  }
  return med;
}

namespace {

EmbeddingMatrix prepare_gaussian_input(const EmbeddingMatrix& e, const KernelConfig& cfg) {
  if (cfg.normalize_input) return e.rowwise().normalized();
  return e;
}

}  // namespace

KernelConfig resolve_sigma(const KernelConfig& cfg, const EmbeddingMatrix& reference) {
  KernelConfig out = cfg;
  if (out.kind == KernelKind::kGaussian && !out.sigma) {
    validate_embeddings(reference, "image");
    out.sigma = median_pairwise_distance(prepare_gaussian_input(reference, cfg));
  }
  return out;
}

FeatureMatrix rff_features(const EmbeddingMatrix& e, const KernelConfig& cfg) {
  if (cfg.kind != KernelKind::kGaussian) {
    throw ValidationError("rff_features requires a gaussian kernel config", "config");
  }
  cfg.validate();
  if (!cfg.sigma) throw ValidationError("sigma is not resolved", "config");
  validate_embeddings(e);
  const RffMap map(e.cols(), *cfg.sigma, cfg.rff_dim, cfg.seed);
  return {map.map(prepare_gaussian_input(e, cfg)), cfg};
}

FeatureMatrix features(const EmbeddingMatrix& e, const KernelConfig& cfg) {
  if (cfg.kind == KernelKind::kCosine) {
    FeatureMatrix out = cosine_features(e);
    out.config = cfg;
    return out;
  }
  return rff_features(e, cfg);
}

PairedFeatures paired_features(const EmbeddingMatrix& image, const EmbeddingMatrix& text,
                               const KernelConfig& cfg) {
  cfg.validate();
  if (image.cols() != text.cols()) {
    std::ostringstream os;
    os << "image and text embeddings differ in dimension (" << image.cols() << " vs "
       << text.cols() << ")";
    throw ValidationError(os.str(), "pairing");
  }
  const KernelConfig resolved = resolve_sigma(cfg, image);
  if (resolved.kind == KernelKind::kCosine) {
    return {features(image, resolved), features(text, resolved)};
  }
  validate_embeddings(image, "image");
  validate_embeddings(text, "text");
  const RffMap map(image.cols(), *resolved.sigma, resolved.rff_dim, resolved.seed);
  return {{map.map(prepare_gaussian_input(image, resolved)), resolved},
          {map.map(prepare_gaussian_input(text, resolved)), resolved}};
}

Matrix gram(const FeatureMatrix& phi) {
  validate_features(phi);
  Matrix k(phi.n(), phi.n());
  k.setZero();
  k.selfadjointView<Eigen::Lower>().rankUpdate(phi.rows);
  return k.selfadjointView<Eigen::Lower>();
}

}  // namespace scendi
