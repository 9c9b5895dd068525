#include "scendi/synth.hpp"

#include <cmath>
#include <random>

namespace scendi::synth {

namespace {

Matrix orthonormal_frame(int dim, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, count);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, count);
  // Fix the sign so the frame does not depend on QR conventions.
  const Matrix r = qr.matrixQR().topRows(count).triangularView<Eigen::Upper>();
  for (int j = 0; j < count; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Vector noise_vector(int dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector e(dim);
  for (int i = 0; i < dim; ++i) e(i) = normal(rng);
  return e * (scale / std::sqrt(static_cast<double>(dim)));
}

std::vector<int> mode_counts(const FactorialSpec& s) {
  std::vector<double> w(static_cast<std::size_t>(s.modes));
  double total = 0.0;
  for (int j = 0; j < s.modes; ++j) total += (w[static_cast<std::size_t>(j)] = std::pow(s.mode_decay, j));
  std::vector<int> counts;
  const double budget = static_cast<double>(s.per_mode) * s.modes;
  for (double wj : w) counts.push_back(std::max(1, static_cast<int>(std::lround(budget * wj / total))));
  return counts;
}

}  // namespace

void FactorialSpec::validate() const {
  if (clusters < 1 || modes < 1 || per_mode < 1) {
    throw ValidationError("clusters, modes and per_mode must be positive", "config");
  }
  if (dim < 2 * clusters + modes + 2) {
    throw ValidationError("dim must be at least 2*clusters + modes + 2 = " +
                              std::to_string(2 * clusters + modes + 2),
                          "config");
  }
  if (noise < 0.0 || !(mode_decay > 0.0)) {
    throw ValidationError("noise must be >= 0 and mode_decay > 0", "config");
  }
}

PairedCorpus factorial(const FactorialSpec& s) {
  s.validate();
  std::mt19937_64 rng(s.seed);
  const Matrix frame = orthonormal_frame(s.dim, 2 * s.clusters + s.modes + 2, rng);
  int col = 0;
  const Vector g = frame.col(col++);
  const Matrix b = frame.middleCols(col, s.clusters);
  col += s.clusters;
  const Matrix modes = frame.middleCols(col, s.modes);
  col += s.modes;
  const Vector g_t = frame.col(col++);
  const Matrix t = frame.middleCols(col, s.clusters);

  const std::vector<int> counts = mode_counts(s);
  int n = 0;
  for (int c : counts) n += c;
  n *= s.clusters;

  PairedCorpus out;
  out.image.resize(n, s.dim);
  out.text.resize(n, s.dim);
  int row = 0;
  for (int k = 0; k < s.clusters; ++k) {
    const std::string group = "c" + std::to_string(k);
    const Vector prompt = s.prompts == PromptMode::kInPrompt ? Vector(g_t + t.col(k)) : g_t;
    const std::string prompt_text =
        s.prompts == PromptMode::kInPrompt ? "a photo of a " + group + " subject"
                                           : "a photo of a subject";
    for (int j = 0; j < s.modes; ++j) {
      for (int r = 0; r < counts[static_cast<std::size_t>(j)]; ++r) {
        Vector x = s.generic_weight * g + s.cluster_weight * b.col(k) +
                   s.mode_weight * modes.col(j);
        if (s.noise > 0.0) x += noise_vector(s.dim, s.noise, rng);
        out.image.row(row) = x.transpose();
        out.text.row(row) = prompt.transpose();
        out.manifest.records.push_back({prompt_text, row, row, group});
        out.cluster.push_back(k);
        out.mode.push_back(j);
        ++row;
      }
    }
  }
  return out;
}

FactorialSpec text_explained_preset(int clusters, int per_cluster, int dim,
                                    std::uint64_t seed) {
  FactorialSpec s;
  s.clusters = clusters;
  s.modes = 1;
  s.per_mode = per_cluster;
  s.dim = dim;
  s.mode_weight = 0.0;
  s.noise = 0.0;
  s.prompts = PromptMode::kInPrompt;
  s.seed = seed;
  return s;
}

FactorialSpec constant_text_preset(int n, int dim, std::uint64_t seed) {
  FactorialSpec s;
  s.clusters = 1;
  s.modes = n;
  s.per_mode = 1;
  s.dim = dim;
  s.generic_weight = 0.0;
  s.cluster_weight = 0.0;
  s.mode_weight = 1.0;
  s.noise = 0.0;
  s.prompts = PromptMode::kGeneric;
  s.seed = seed;
  return s;
}

TwoFactorCorpus two_factor(const TwoFactorSpec& s) {
  if (s.animals < 1 || s.fruits < 1 || s.per_cell < 1 || s.reference_per_fruit < 1) {
    throw ValidationError("two-factor counts must be positive", "config");
  }
  if (static_cast<int>(s.animal_salience.size()) != s.animals) {
    throw ValidationError("need one salience value per animal", "config");
  }
  if (s.dim < s.animals + 2 * s.fruits) {
    throw ValidationError("dim too small for the two-factor frame", "config");
  }
  std::mt19937_64 rng(s.seed);
  const Matrix frame = orthonormal_frame(s.dim, s.animals + 2 * s.fruits, rng);
  const Matrix a = frame.leftCols(s.animals);
  const Matrix f = frame.middleCols(s.animals, s.fruits);
  const Matrix ft = frame.rightCols(s.fruits);

  TwoFactorCorpus out;
  const int n = s.animals * s.fruits * s.per_cell;
  auto& c = out.corpus;
  c.image.resize(n, s.dim);
  c.text.resize(n, s.dim);
  int row = 0;
  for (int i = 0; i < s.animals; ++i) {
    for (int j = 0; j < s.fruits; ++j) {
      for (int r = 0; r < s.per_cell; ++r) {
        Vector x = s.animal_salience[static_cast<std::size_t>(i)] * a.col(i) +
                   s.fruit_weight * f.col(j);
        if (s.noise > 0.0) x += noise_vector(s.dim, s.noise, rng);
        c.image.row(row) = x.transpose();
        c.text.row(row) = ft.col(j).transpose();
        c.manifest.records.push_back({"a photo with fruit " + std::to_string(j), row, row,
                                      "animal" + std::to_string(i)});
        c.cluster.push_back(i);
        c.mode.push_back(j);
        ++row;
      }
    }
  }

  auto& ref = out.reference;
  const int m = s.fruits * s.reference_per_fruit;
  ref.image.resize(m, s.dim);
  ref.text.resize(m, s.dim);
  row = 0;
  for (int j = 0; j < s.fruits; ++j) {
    for (int r = 0; r < s.reference_per_fruit; ++r) {
      Vector x = s.fruit_weight * f.col(j);
      if (s.noise > 0.0) x += noise_vector(s.dim, s.noise, rng);
      ref.image.row(row) = x.transpose();
      ref.text.row(row) = ft.col(j).transpose();
      ref.manifest.records.push_back({"a photo with fruit " + std::to_string(j), row, row,
                                      "fruit" + std::to_string(j)});
      ref.cluster.push_back(j);
      ref.mode.push_back(0);
      ++row;
    }
  }
  return out;
}

void write_corpus(const PairedCorpus& c, const std::filesystem::path& prefix) {
  const std::filesystem::path img = prefix.string() + ".img.npy";
  const std::filesystem::path txt = prefix.string() + ".txt.npy";
  io::save_matrix(c.image, img);
  io::save_matrix(c.text, txt);
  io::PairManifest m = c.manifest;
  m.image_matrix = img.filename();
  m.text_matrix = txt.filename();
  io::save_manifest(m, prefix.string() + ".manifest.json");
}

}  // namespace scendi::synth
