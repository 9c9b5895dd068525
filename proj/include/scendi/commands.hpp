#pragma once

// Command implementations behind the `scendi` executable. Each run_* function
// performs file I/O and throws scendi::Error on failure.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "scendi/io.hpp"

namespace scendi::cli {

struct KernelFlags {
  std::string kernel = "cosine";
  std::string sigma = "median";
  int rff_dim = 2000;
  std::uint64_t seed = 0;
  double rel_cutoff = kDefaultRelCutoff;
  double ridge = 0.0;
  bool center = false;
  bool renormalize = false;
  bool normalize_input = false;

  io::RunConfig to_config() const;
};

struct InputFlags {
  std::string images;
  std::string texts;
  std::string manifest;
};

struct ScoreArgs {
  InputFlags in;
  KernelFlags kernel;
  std::string out;
};

struct DecomposeArgs {
  InputFlags in;
  KernelFlags kernel;
  std::string out;  // prefix
};

struct ModifyArgs {
  InputFlags in;
  KernelFlags kernel;
  std::string gamma;  // prefit modifier; empty fits on the inputs
  bool naive = false;
  std::string save_gamma;
  std::string corpus;
  std::string out;
};

struct RetrieveArgs {
  std::string query;
  std::string query_text;
  std::string gallery;
  KernelFlags kernel;
  std::string gamma;
  bool naive = false;
  int k = 5;
  std::string out;
};

struct ClusterArgs {
  InputFlags in;
  KernelFlags kernel;
  int m = 2;
  std::string which = "none";  // none | model | text
  std::string gamma;           // reference modifier for model/text
  std::string out;
};

struct SweepArgs {
  InputFlags in;
  KernelFlags kernel;
  std::string order;  // comma-separated; empty = first appearance
  bool per_group = false;
  std::string out;
};

struct SynthArgs {
  std::string preset = "factorial";  // factorial | text-explained | constant-text | two-factor
  int clusters = 3;
  int modes = 4;
  int per_mode = 25;
  int dim = 32;
  double noise = 0.05;
  double mode_weight = 0.6;
  double cluster_weight = 1.0;
  std::string prompts = "in-prompt";  // in-prompt | generic
  std::uint64_t seed = 0;
  std::string out;  // prefix
};

/// Thread cap from SCENDI_THREADS (defaults to hardware concurrency).
int thread_cap();

void run_score(const ScoreArgs& a, std::ostream& log);
void run_decompose(const DecomposeArgs& a, std::ostream& log);
void run_modify(const ModifyArgs& a, std::ostream& log);
void run_retrieve(const RetrieveArgs& a, std::ostream& log);
void run_cluster(const ClusterArgs& a, std::ostream& log);
void run_sweep_command(const SweepArgs& a, std::ostream& log);
void run_synth(const SynthArgs& a, std::ostream& log);

/// {"error": {"kind", "message", "exit_code"}} on one line.
std::string error_json(const std::string& kind, const std::string& message, int exit_code);

}  // namespace scendi::cli
