#include "scendi/kpca.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

#include "scendi/scores.hpp"

namespace scendi {

namespace {

void require_cluster_count(int m, Eigen::Index n) {
  if (m < 1 || m > n) {
    throw ValidationError("cluster count must lie in [1, " + std::to_string(n) + "], got " +
                              std::to_string(m),
                          "config");
  }
}

std::vector<int> argmax_labels(const Matrix& scores) {
  std::vector<int> labels(static_cast<std::size_t>(scores.rows()), 0);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

ClusterAssignment degenerate(Eigen::Index n, int m, std::string warning) {
  ClusterAssignment out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  out.scores = Matrix::Zero(n, m);
  out.eigenvalues = Vector::Zero(m);
  out.warning = std::move(warning);
  return out;
}

}  // namespace

ClusterAssignment kpca_clusters_rows(const Matrix& rows, int m, bool center) {
  const Eigen::Index n = rows.rows();
  require_cluster_count(m, n);
  Matrix k(n, n);
  k.noalias() = rows * rows.transpose();
  k /= static_cast<double>(n);
  if (center) {
    const Vector col_mean = k.colwise().mean().transpose();
    const double total = col_mean.mean();
    k = (k.rowwise() - col_mean.transpose()).colwise() - col_mean;
    k.array() += total;
  }
  k = (k + k.transpose()) * 0.5;
  const auto es = eigh(k);

  if (es.values(0) < kSpectrumFloor) {
    return degenerate(n, m, "kernel matrix has no nonzero eigenvalues; single cluster");
  }
  ClusterAssignment out;
  out.eigenvalues = es.values.head(m).cwiseMax(0.0);
  out.scores = es.vectors.leftCols(m).array().square();
  int live = 0;
  for (int j = 0; j < m; ++j) {
    if (es.values(j) < kSpectrumFloor) {
      out.scores.col(j).setZero();
    } else {
      ++live;
    }
  }
  if (live < m) {
    out.warning = "only " + std::to_string(live) + " of " + std::to_string(m) +
                  " eigendirections carry mass";
  }
  out.labels = argmax_labels(out.scores);
  return out;
}

ClusterAssignment kpca_clusters(const FeatureMatrix& phi, int m, bool center) {
  validate_features(phi);
  return kpca_clusters_rows(phi.rows, m, center);
}

ClusterAssignment schur_clusters(const FeatureMatrix& image, const FeatureMatrix& text, int m,
                                 SchurPart which, const DecomposeOptions& opts,
                                 const Modifier* reference) {
  require_paired(image, text);
  const Eigen::Index n = image.n();
  require_cluster_count(m, n);
  if (m > image.dim()) {
    throw ValidationError("cluster count exceeds the feature dimension", "config");
  }

  Matrix component;
  Matrix loads;  // rows whose projections give the sample loadings
  if (reference == nullptr) {
    SchurDecomposition d = schur_decompose(image, text, opts);
    const Matrix predicted = text.rows * d.gamma_star.transpose();
    if (which == SchurPart::kModel) {
      component = std::move(d.lambda_i);
      loads = image.rows - predicted;
    } else {
      component = std::move(d.lambda_t);
      loads = predicted;
    }
  } else {
    validate_features(image);
    validate_features(text);
    if (reference->dim() != image.dim() || reference->gamma_star.cols() != text.dim()) {
      throw ValidationError("reference modifier does not match the feature dimension", "shape");
    }
    const Matrix predicted = text.rows * reference->gamma_star.transpose();
    loads = which == SchurPart::kModel ? Matrix(image.rows - predicted) : predicted;
    component.noalias() = loads.transpose() * loads;
    component /= static_cast<double>(n);
    component = (component + component.transpose()) * 0.5;
  }

  const auto es = eigh(component);
  const char* part = which == SchurPart::kModel ? "model-driven" : "prompt-driven";
  if (es.values(0) < kSpectrumFloor) {
    return degenerate(n, m, std::string(part) + " component vanishes; single cluster");
  }

  ClusterAssignment out;
  out.eigenvalues = es.values.head(m).cwiseMax(0.0);
  out.scores = Matrix::Zero(n, m);
  int live = 0;
  for (int j = 0; j < m; ++j) {
    const double l = es.values(j);
    if (l < kSpectrumFloor) continue;
    ++live;
    // Squared Gram-side eigenvector entry: (u_j . r_i)^2 / (n l_j).
    const Vector proj = loads * es.vectors.col(j);
    out.scores.col(j) = proj.array().square() / (static_cast<double>(n) * l);
  }
  if (live < m) {
    out.warning = std::string(part) + " component has only " + std::to_string(live) + " of " +
                  std::to_string(m) + " nonzero eigendirections";
  }
  out.labels = argmax_labels(out.scores);
  return out;
}

double label_agreement(const std::vector<int>& a, const std::vector<int>& b, int k) {
  if (a.size() != b.size()) throw ValidationError("label vectors differ in length", "shape");
  if (k < 1 || k > 8) throw ValidationError("label_agreement supports 1..8 clusters", "config");
  if (a.empty()) return 1.0;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < 0 || a[i] >= k || b[i] < 0 || b[i] >= k) {
        throw ValidationError("label out of range", "config");
      }
      if (perm[static_cast<std::size_t>(a[i])] == b[i]) ++hits;
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(a.size());
}

std::string clusters_to_json(const ClusterAssignment& c, int indent) {
  using nlohmann::json;
  json j;
  j["labels"] = c.labels;
  j["eigenvalues"] = std::vector<double>(c.eigenvalues.data(),
                                         c.eigenvalues.data() + c.eigenvalues.size());
  json top = json::array();
  for (Eigen::Index i = 0; i < c.scores.rows(); ++i) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(c.scores.cols()));
    std::iota(idx.begin(), idx.end(), 0);
    const auto keep = std::min<std::size_t>(3, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                      [&](Eigen::Index x, Eigen::Index y) {
                        return c.scores(i, x) != c.scores(i, y) ? c.scores(i, x) > c.scores(i, y)
                                                                : x < y;
                      });
    json row = json::array();
    for (std::size_t t = 0; t < keep; ++t) {
      row.push_back({{"cluster", idx[t]}, {"loading", c.scores(i, idx[t])}});
    }
    top.push_back(std::move(row));
  }
  j["top_loadings"] = std::move(top);
  j["warning"] = c.warning.empty() ? json(nullptr) : json(c.warning);
  return j.dump(indent) + "\n";
}

}  // namespace scendi
