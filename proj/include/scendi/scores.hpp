#pragma once

// Vendi, RKE and the Schur-complement entropy scores.

#include <vector>

#include "scendi/covariance.hpp"
#include "scendi/kernels.hpp"

namespace scendi {

/// Eigenvalues below this absolute level count as exact zeros in entropy sums.
inline constexpr double kSpectrumFloor = 1e-12;

struct DiversityReport {
  double vendi = 1.0;
  double rke = 1.0;
  double scendi_i = 1.0;
  double scendi_t = 1.0;
  double trace_i = 0.0;
  double trace_t = 0.0;
  std::vector<double> spectrum_ii;
  std::vector<double> spectrum_lambda_i;
  std::vector<double> spectrum_lambda_t;
  KernelConfig kernel_config;
  Eigen::Index n = 0;
  Eigen::Index feature_dim = 0;

  bool operator==(const DiversityReport&) const = default;
};

/// Spectrum of (1/n) Phi^T Phi, descending and clamped to be nonnegative.
Vector covariance_spectrum(const FeatureMatrix& phi);

/// exp(H) of a unit-mass spectrum, ignoring entries below kSpectrumFloor.
double vendi_from_spectrum(const Vector& spectrum);

double vendi(const FeatureMatrix& phi);

/// 1 / |C|_F^2 for C = (1/n) Phi^T Phi.
double rke(const FeatureMatrix& phi);

/// exp(sum_j l_j log(trace / l_j)) over entries >= kSpectrumFloor; 1 when
/// nothing survives or trace is not positive.
double scendi_from_spectrum(const Vector& spectrum, double trace);

double scendi(const SchurDecomposition& decomp);
double scendi_text(const SchurDecomposition& decomp);

/// Full pipeline on aligned feature matrices.
DiversityReport evaluate(const FeatureMatrix& image, const FeatureMatrix& text,
                         const DecomposeOptions& opts = {});

/// Copies entries at or above kSpectrumFloor.
std::vector<double> truncated_spectrum(const Vector& spectrum);

}  // namespace scendi
