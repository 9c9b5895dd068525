#pragma once

// Group sweeps: score the union of the first k groups (cumulative) or each
// group alone, producing one plot-ready row per point.

#include <string>
#include <vector>

#include "scendi/io.hpp"
#include "scendi/scores.hpp"

namespace scendi {

struct SweepSpec {
  std::vector<std::string> order;  // each group exactly once
  bool cumulative = true;
};

struct SweepRow {
  int group_count = 0;
  std::string group;  // last group added (cumulative) or the group itself
  double vendi = 1.0;
  double rke = 1.0;
  double scendi_i = 1.0;
  double scendi_t = 1.0;
  double trace_i = 0.0;
};

/// Groups in order of first appearance; throws if any record lacks one.
std::vector<std::string> manifest_groups(const io::PairManifest& m);

/// Checks that every record has a group and `spec.order` lists each group
/// exactly once.
void validate_sweep(const io::PairManifest& m, const SweepSpec& spec);

/// `image`/`text` hold raw embeddings whose rows follow the manifest
/// records. Each point is featurized on its own rows, so an unset Gaussian
/// bandwidth is resolved per point exactly as a standalone score run on that
/// subset would. Points run on up to `threads` workers; results do not depend
/// on the thread count.
std::vector<SweepRow> run_sweep(const EmbeddingMatrix& image, const EmbeddingMatrix& text,
                                const io::PairManifest& m, const SweepSpec& spec,
                                const KernelConfig& kernel, const DecomposeOptions& opts = {},
                                int threads = 1);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Spearman rank correlation with average ranks for ties; 0 when either
/// input is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace scendi
