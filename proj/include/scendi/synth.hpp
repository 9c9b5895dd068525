#pragma once

// Seeded synthetic paired embeddings with known structure.
//
// Recipe (factorial generator). Draw one random orthonormal frame in R^dim
// (QR of a Gaussian matrix seeded by `seed`) and name its columns:
//   g            generic image direction ("a cat")
//   b_1..b_K     cluster image directions ("breed")
//   m_1..m_M     model-driven mode directions, shared by all clusters
//   g_t          generic text direction
//   t_1..t_K     cluster text directions
// Cluster k, mode j, replicate r produces the image embedding
//   x = w_g g + w_c b_k + w_m m_j + noise * e / sqrt(dim),  e ~ N(0, I)
// and the prompt embedding
//   in-prompt:  g_t + t_k          generic:  g_t
// Replicates are laid out cluster-major, then mode, then replicate, so every
// cluster holds exactly M * per_mode samples spread evenly over the modes.
// Mode j of cluster k appears with weight mode_decay^j before normalizing
// (mode_decay = 1 keeps modes balanced); the count per mode is
// round(per_mode * M * p_j).

#include <cstdint>
#include <string>
#include <vector>

#include "scendi/io.hpp"

namespace scendi::synth {

enum class PromptMode { kInPrompt, kGeneric };

struct FactorialSpec {
  int clusters = 3;
  int modes = 4;
  int per_mode = 25;
  int dim = 32;
  double generic_weight = 1.0;
  double cluster_weight = 1.0;
  double mode_weight = 0.6;
  double noise = 0.05;
  double mode_decay = 1.0;
  PromptMode prompts = PromptMode::kInPrompt;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PairedCorpus {
  Matrix image;  // n x dim raw embeddings
  Matrix text;   // n x dim raw embeddings
  io::PairManifest manifest;
  std::vector<int> cluster;  // ground-truth cluster per row
  std::vector<int> mode;     // ground-truth mode per row
};

PairedCorpus factorial(const FactorialSpec& spec);

/// Every cluster has one image mode and no noise, with the cluster named in
/// the prompt: images are an exact function of the prompt.
FactorialSpec text_explained_preset(int clusters, int per_cluster, int dim,
                                    std::uint64_t seed);

/// n orthonormal images, all paired with one constant prompt.
FactorialSpec constant_text_preset(int n, int dim, std::uint64_t seed);

/// Two crossed factors ("animal" x "fruit"). Image = s_a * a_i + f_j + noise,
/// where animal salience s_a varies per animal level; prompts name only the
/// fruit. Also returns a reference corpus of fruit-only images (f_j + noise)
/// paired with the same fruit prompts, used to fit a correction matrix that
/// does not see the animals.
struct TwoFactorSpec {
  int animals = 3;
  int fruits = 3;
  int per_cell = 20;
  int dim = 32;
  std::vector<double> animal_salience = {1.0, 0.8, 0.6};
  double fruit_weight = 1.0;
  double noise = 0.05;
  int reference_per_fruit = 30;
  std::uint64_t seed = 0;
};

struct TwoFactorCorpus {
  PairedCorpus corpus;     // cluster = animal id, mode = fruit id
  PairedCorpus reference;  // cluster = fruit id
};

TwoFactorCorpus two_factor(const TwoFactorSpec& spec);

/// Writes `<prefix>.img.npy`, `<prefix>.txt.npy` and `<prefix>.manifest.json`
/// (matrix paths stored relative to the manifest).
void write_corpus(const PairedCorpus& c, const std::filesystem::path& prefix);

}  // namespace scendi::synth
