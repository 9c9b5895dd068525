#pragma once

// Shared fixtures for the test binaries.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "scendi/covariance.hpp"
#include "scendi/kernels.hpp"

namespace fixtures {

using scendi::Matrix;
using scendi::Vector;

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

inline Matrix unit_rows(Matrix m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i).normalize();
  return m;
}

inline Matrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
  const Matrix a = gaussian(n, n, seed);
  return (a + a.transpose()) * 0.5;
}

inline scendi::FeatureMatrix as_features(const Matrix& rows) {
  return {rows, scendi::KernelConfig{}};
}

// Rows e_0..e_{n-1} of the d-dimensional identity.
inline Matrix basis_rows(Eigen::Index n, Eigen::Index d, Eigen::Index offset = 0) {
  Matrix m = Matrix::Zero(n, d);
  for (Eigen::Index i = 0; i < n; ++i) m(i, offset + i) = 1.0;
  return m;
}

// Each image appears with its negation under the same prompt, so the
// image-text cross-covariance vanishes.
struct Pair {
  Matrix image;
  Matrix text;
};

inline Pair uncorrelated(Eigen::Index half, Eigen::Index d, std::uint64_t seed) {
  const Matrix x = unit_rows(gaussian(half, d, seed));
  const Matrix t = unit_rows(gaussian(half, d, seed + 1));
  Pair p{Matrix(2 * half, d), Matrix(2 * half, d)};
  p.image << x, -x;
  p.text << t, t;
  return p;
}

// Images correlated with texts: image = normalize(a*text + b*noise).
struct Correlated {
  scendi::FeatureMatrix image;
  scendi::FeatureMatrix text;
};

inline Correlated correlated(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                             double coupling = 1.0) {
  const Matrix t = unit_rows(gaussian(n, d, seed));
  const Matrix e = gaussian(n, d, seed + 1000);
  const Matrix i = unit_rows(coupling * t + 0.7 * e);
  return {as_features(i), as_features(t)};
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("scendi_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
