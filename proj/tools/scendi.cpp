// scendi: prompt-aware diversity scores and prompt-direction cancellation for
// paired image/text embeddings.

#include <CLI11.hpp>

#include <iostream>

#include "scendi/commands.hpp"
#include "scendi/error.hpp"

namespace {

using namespace scendi::cli;

void add_inputs(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("--images", in.images, "Image embeddings (NPY or CSV)");
  cmd->add_option("--texts", in.texts, "Text embeddings (NPY or CSV)");
  cmd->add_option("--manifest", in.manifest, "Pair manifest (JSON or CSV)");
}

void add_kernel(CLI::App* cmd, KernelFlags& k) {
  cmd->add_option("--kernel", k.kernel, "cosine | gaussian")
      ->check(CLI::IsMember({"cosine", "gaussian"}))
      ->capture_default_str();
  cmd->add_option("--sigma", k.sigma, "Gaussian bandwidth, or 'median'")->capture_default_str();
  cmd->add_option("--rff-dim", k.rff_dim, "Random Fourier feature dimension (even)")
      ->capture_default_str();
  cmd->add_option("--seed", k.seed, "Seed for random features")->capture_default_str();
  cmd->add_option("--rel-cutoff", k.rel_cutoff, "Relative pseudoinverse cutoff")
      ->capture_default_str();
  cmd->add_option("--ridge", k.ridge, "Ridge added to C_TT before inversion")
      ->capture_default_str();
  cmd->add_flag("--normalize-input", k.normalize_input,
                "Unit-normalize embeddings before the Gaussian kernel");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt-aware diversity evaluation of paired image/text embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "scendi 0.1.0");

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Vendi, RKE and Scendi scores as a JSON report");
  add_inputs(c_score, score.in);
  add_kernel(c_score, score.kernel);
  c_score->add_option("--out", score.out, "Report JSON path")->required();

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "Schur decomposition spectra and Gamma* files");
  add_inputs(c_dec, dec.in);
  add_kernel(c_dec, dec.kernel);
  c_dec->add_option("--out", dec.out, "Output prefix")->required();

  ModifyArgs mod;
  auto* c_mod = app.add_subcommand("modify", "Cancel prompt directions: phi(I) - Gamma* phi(T)");
  add_inputs(c_mod, mod.in);
  add_kernel(c_mod, mod.kernel);
  c_mod->add_option("--gamma", mod.gamma, "Prefit modifier prefix (default: fit on inputs)");
  c_mod->add_flag("--naive", mod.naive, "Use phi(I) - phi(T) instead of Gamma*");
  c_mod->add_flag("--renormalize", mod.kernel.renormalize, "Unit-normalize modified vectors");
  c_mod->add_option("--save-gamma", mod.save_gamma, "Write the fitted modifier to this prefix");
  c_mod->add_option("--corpus", mod.corpus, "Corpus identifier recorded with the modifier");
  c_mod->add_option("--out", mod.out, "Modified features NPY")->required();

  RetrieveArgs ret;
  auto* c_ret = app.add_subcommand("retrieve", "Cosine top-k retrieval, optionally on modified queries");
  c_ret->add_option("--query", ret.query, "Query image embeddings")->required();
  c_ret->add_option("--query-text", ret.query_text, "Prompt embeddings paired with the queries");
  c_ret->add_option("--gallery", ret.gallery, "Gallery embeddings")->required();
  add_kernel(c_ret, ret.kernel);
  c_ret->add_option("--gamma", ret.gamma, "Modifier prefix used to edit the queries");
  c_ret->add_flag("--naive", ret.naive, "Edit queries with phi(I) - phi(T)");
  c_ret->add_flag("--renormalize", ret.kernel.renormalize, "Unit-normalize modified queries");
  c_ret->add_option("--k", ret.k, "Number of results per query")->capture_default_str();
  c_ret->add_option("--out", ret.out, "Results CSV (query,rank,index,score)")->required();

  ClusterArgs clu;
  auto* c_clu = app.add_subcommand("cluster", "Kernel-PCA clusters of the images or a Schur component");
  add_inputs(c_clu, clu.in);
  add_kernel(c_clu, clu.kernel);
  c_clu->add_option("--m", clu.m, "Number of clusters")->capture_default_str();
  c_clu->add_option("--which", clu.which, "none | model | text")
      ->check(CLI::IsMember({"none", "model", "text"}))
      ->capture_default_str();
  c_clu->add_flag("--center", clu.kernel.center, "Double-center the kernel matrix (which=none)");
  c_clu->add_option("--gamma", clu.gamma, "Reference modifier prefix");
  c_clu->add_option("--out", clu.out, "Cluster JSON path")->required();

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "Scores over cumulative unions of manifest groups");
  add_inputs(c_sw, sw.in);
  add_kernel(c_sw, sw.kernel);
  c_sw->add_option("--order", sw.order, "Comma-separated group order");
  auto* cum = c_sw->add_flag("--cumulative", "Score the union of the first k groups (default)");
  c_sw->add_flag("--per-group", sw.per_group, "Score each group alone")->excludes(cum);
  c_sw->add_option("--out", sw.out, "Sweep CSV path")->required();

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate seeded synthetic paired embeddings");
  c_syn->add_option("--preset", syn.preset, "factorial | text-explained | constant-text | two-factor")
      ->check(CLI::IsMember({"factorial", "text-explained", "constant-text", "two-factor"}))
      ->capture_default_str();
  c_syn->add_option("--clusters", syn.clusters, "Text clusters (animals for two-factor)")
      ->capture_default_str();
  c_syn->add_option("--modes", syn.modes, "Model-driven modes per cluster (fruits for two-factor)")
      ->capture_default_str();
  c_syn->add_option("--per-mode", syn.per_mode, "Samples per mode (per cell for two-factor)")
      ->capture_default_str();
  c_syn->add_option("--dim", syn.dim, "Embedding dimension")->capture_default_str();
  c_syn->add_option("--noise", syn.noise, "Within-mode noise norm")->capture_default_str();
  c_syn->add_option("--mode-weight", syn.mode_weight, "Mode direction weight")->capture_default_str();
  c_syn->add_option("--cluster-weight", syn.cluster_weight, "Cluster direction weight")
      ->capture_default_str();
  c_syn->add_option("--prompts", syn.prompts, "in-prompt | generic")
      ->check(CLI::IsMember({"in-prompt", "generic"}))
      ->capture_default_str();
  c_syn->add_option("--seed", syn.seed, "Generator seed")->capture_default_str();
  c_syn->add_option("--out", syn.out, "Output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << error_json("usage", e.what(), 2) << "\n";
    return static_cast<int>(scendi::ExitCode::kValidation);
  }

  try {
    if (*c_score) run_score(score, std::cout);
    if (*c_dec) run_decompose(dec, std::cout);
    if (*c_mod) run_modify(mod, std::cout);
    if (*c_ret) run_retrieve(ret, std::cout);
    if (*c_clu) run_cluster(clu, std::cout);
    if (*c_sw) run_sweep_command(sw, std::cout);
    if (*c_syn) run_synth(syn, std::cout);
  } catch (const scendi::Error& e) {
    std::cerr << error_json(e.kind(), e.what(), static_cast<int>(e.code())) << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what(), 3) << "\n";
    return static_cast<int>(scendi::ExitCode::kNumerical);
  }
  return 0;
}
