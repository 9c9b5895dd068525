#pragma once

// Prompt-direction cancellation on kernel features: x_I - Gamma* x_T, the
// identity-Gamma baseline, and cosine top-k retrieval.

#include <filesystem>
#include <string>
#include <vector>

#include "scendi/covariance.hpp"

namespace scendi {

struct Modifier {
  Matrix gamma_star;
  KernelConfig kernel_config;
  std::string fitted_on;
  double rel_cutoff = kDefaultRelCutoff;
  std::string created_at;

  Eigen::Index dim() const { return gamma_star.rows(); }
};

Modifier fit_modifier(const FeatureMatrix& image, const FeatureMatrix& text,
                      const DecomposeOptions& opts = {}, std::string corpus = {});

/// x_i - Gamma* x_t, optionally rescaled to unit norm (zero stays zero).
Vector modify(const Vector& x_i, const Vector& x_t, const Modifier& m,
              bool renormalize = false);
/// Row-wise batch form.
Matrix modify_rows(const Matrix& image_rows, const Matrix& text_rows, const Modifier& m,
                   bool renormalize = false);

/// x_i - x_t.
Vector naive_modify(const Vector& x_i, const Vector& x_t, bool renormalize = false);
Matrix naive_modify_rows(const Matrix& image_rows, const Matrix& text_rows,
                         bool renormalize = false);

struct RetrievalHit {
  Eigen::Index index = 0;
  double score = 0.0;

  bool operator==(const RetrievalHit&) const = default;
};

/// k gallery rows with the largest cosine similarity to `query`, descending,
/// ties to the lower index. A zero query or zero gallery row scores 0.
std::vector<RetrievalHit> retrieve_topk(const Vector& query, const Matrix& gallery,
                                        Eigen::Index k);

/// Writes `<prefix>.gamma.npy` and `<prefix>.gamma.json`.
void save_modifier(const Modifier& m, const std::filesystem::path& prefix);
/// Accepts either the prefix or the path of the `.gamma.npy` file.
Modifier load_modifier(const std::filesystem::path& prefix);

std::filesystem::path modifier_npy_path(const std::filesystem::path& prefix);
std::filesystem::path modifier_json_path(const std::filesystem::path& prefix);

}  // namespace scendi
