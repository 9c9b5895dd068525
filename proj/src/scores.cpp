#include "scendi/scores.hpp"

#include <cmath>

namespace scendi {

namespace {

Vector kept(const Vector& spectrum) {
  Vector out(spectrum.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum(i) >= kSpectrumFloor) out(k++) = spectrum(i);
  }
  out.conservativeResize(k);
  return out;
}

Matrix covariance(const FeatureMatrix& phi) {
  validate_features(phi);
  Matrix c(phi.dim(), phi.dim());
  c.noalias() = phi.rows.transpose() * phi.rows;
  c /= static_cast<double>(phi.n());
  return (c + c.transpose()) * 0.5;
}

}  // namespace

Vector covariance_spectrum(const FeatureMatrix& phi) {
  return clamp_psd(eigvalsh(covariance(phi)));
}

double vendi_from_spectrum(const Vector& spectrum) {
  return std::exp(matrix_entropy(kept(spectrum)));
}

double vendi(const FeatureMatrix& phi) { return vendi_from_spectrum(covariance_spectrum(phi)); }

double rke(const FeatureMatrix& phi) { return 1.0 / covariance(phi).squaredNorm(); }

double scendi_from_spectrum(const Vector& spectrum, double trace) {
  if (!(trace > 0.0)) return 1.0;
  const Vector l = kept(spectrum);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < l.size(); ++j) sum += l(j) * std::log(trace / l(j));
  return std::exp(sum);
}

double scendi(const SchurDecomposition& decomp) {
  return scendi_from_spectrum(decomp.spectrum_i, decomp.trace_i);
}

double scendi_text(const SchurDecomposition& decomp) {
  return scendi_from_spectrum(decomp.spectrum_t, decomp.trace_t);
}

std::vector<double> truncated_spectrum(const Vector& spectrum) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum(i) >= kSpectrumFloor) out.push_back(spectrum(i));
  }
  return out;
}

DiversityReport evaluate(const FeatureMatrix& image, const FeatureMatrix& text,
                         const DecomposeOptions& opts) {
  const CovarianceBlocks b = blocks(image, text);
  const SchurDecomposition decomp = schur_decompose(image, text, opts);
  const Vector spec_ii = clamp_psd(eigvalsh(b.c_ii));

  DiversityReport r;
  r.vendi = vendi_from_spectrum(spec_ii);
  r.rke = 1.0 / b.c_ii.squaredNorm();
  r.scendi_i = scendi(decomp);
  r.scendi_t = scendi_text(decomp);
  r.trace_i = decomp.trace_i;
  r.trace_t = decomp.trace_t;
  r.spectrum_ii = truncated_spectrum(spec_ii);
  r.spectrum_lambda_i = truncated_spectrum(decomp.spectrum_i);
  r.spectrum_lambda_t = truncated_spectrum(decomp.spectrum_t);
  r.kernel_config = image.config;
  r.n = image.n();
  r.feature_dim = image.dim();
  return r;
}

}  // namespace scendi
