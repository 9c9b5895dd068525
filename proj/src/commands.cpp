#include "scendi/commands.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include "scendi/embed_edit.hpp"
#include "scendi/kpca.hpp"
#include "scendi/sweep.hpp"
#include "scendi/synth.hpp"

namespace scendi::cli {

using nlohmann::json;
namespace fs = std::filesystem;

io::RunConfig KernelFlags::to_config() const {
  io::RunConfig c;
  c.kernel.kind = parse_kernel_kind(kernel);
  if (sigma != "median") {
    std::size_t pos = 0;
    double s = 0.0;
    try {
      s = std::stod(sigma, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != sigma.size()) {
      throw ValidationError("--sigma must be a number or 'median', got '" + sigma + "'",
                            "config");
    }
    c.kernel.sigma = s;
  }
  c.kernel.rff_dim = rff_dim;
  c.kernel.seed = seed;
  c.kernel.normalize_input = normalize_input;
  c.rel_cutoff = rel_cutoff;
  c.ridge = ridge;
  c.center = center;
  c.renormalize = renormalize;
  c.validate();
  return c;
}

int thread_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SCENDI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  return cap;
}

std::string error_json(const std::string& kind, const std::string& message, int exit_code) {
  return json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}}.dump();
}

namespace {

struct Inputs {
  Matrix image;  // rows in manifest order
  Matrix text;
  io::PairManifest manifest;
  std::vector<io::InputDigest> digests;
  std::string corpus;  // identifier for provenance
};

io::InputDigest digest(const std::string& role, const fs::path& path, Eigen::Index rows,
                       Eigen::Index cols) {
  return {role, path.string(), io::sha256_file(path), rows, cols};
}

Inputs load_inputs(const InputFlags& f) {
  Inputs in;
  std::optional<io::PairManifest> manifest;
  if (!f.manifest.empty()) manifest = io::load_manifest(f.manifest);

  fs::path img_path = f.images;
  fs::path txt_path = f.texts;
  if (img_path.empty() && manifest && manifest->image_matrix) img_path = *manifest->image_matrix;
  if (txt_path.empty() && manifest && manifest->text_matrix) txt_path = *manifest->text_matrix;
  if (img_path.empty() || txt_path.empty()) {
    throw ValidationError("need --images and --texts (or a manifest naming both matrices)",
                          "config");
  }
  const Matrix image = io::load_matrix(img_path);
  const Matrix text = io::load_matrix(txt_path);
  if (image.cols() != text.cols()) {
    throw ValidationError("image and text embeddings differ in dimension", "pairing");
  }
  if (!manifest) {
    if (image.rows() != text.rows()) {
      throw ValidationError("without a manifest the image and text matrices must have the "
                            "same number of rows",
                            "pairing");
    }
    manifest = io::identity_manifest(image.rows());
  }
  io::validate_manifest(*manifest, image.rows(), text.rows());
  in.image = io::select_rows(image, io::image_rows(*manifest));
  in.text = io::select_rows(text, io::text_rows(*manifest));
  in.digests.push_back(digest("image", img_path, image.rows(), image.cols()));
  in.digests.push_back(digest("text", txt_path, text.rows(), text.cols()));
  if (!f.manifest.empty()) {
    in.digests.push_back(digest("manifest", f.manifest,
                                static_cast<Eigen::Index>(manifest->records.size()), 0));
  }
  in.corpus = img_path.filename().string();
  in.manifest = std::move(*manifest);
  return in;
}

DecomposeOptions decompose_options(const io::RunConfig& c) {
  DecomposeOptions o;
  o.rel_cutoff = c.rel_cutoff;
  o.ridge = c.ridge;
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void configure_threads() { Eigen::setNbThreads(thread_cap()); }

// Kernel config of a prefit modifier must agree with the requested kernel.
io::RunConfig config_with_modifier(io::RunConfig c, const Modifier& m) {
  if (m.kernel_config.kind != c.kernel.kind) {
    throw ValidationError("modifier was fitted with the " +
                              std::string(to_string(m.kernel_config.kind)) +
                              " kernel but --kernel is " +
                              std::string(to_string(c.kernel.kind)),
                          "config");
  }
  c.kernel = m.kernel_config;
  return c;
}

}  // namespace

void run_score(const ScoreArgs& a, std::ostream& log) {
  configure_threads();
  if (a.out.empty()) throw ValidationError("--out is required", "config");
  io::RunConfig cfg = a.kernel.to_config();
  cfg.outputs = {a.out};
  const Inputs in = load_inputs(a.in);
  const PairedFeatures phi = paired_features(in.image, in.text, cfg.kernel);

  io::ReportDocument doc;
  doc.report = evaluate(phi.image, phi.text, decompose_options(cfg));
  doc.config = cfg;
  doc.inputs = in.digests;
  doc.tool_version = std::string(io::tool_version());
  doc.created_at = io::utc_timestamp();
  io::write_report(doc, a.out);
  log << "vendi=" << fmt(doc.report.vendi) << " rke=" << fmt(doc.report.rke)
      << " scendi_i=" << fmt(doc.report.scendi_i) << " scendi_t=" << fmt(doc.report.scendi_t)
      << " trace_i=" << fmt(doc.report.trace_i) << "\n";
}

void run_decompose(const DecomposeArgs& a, std::ostream& log) {
  configure_threads();
  if (a.out.empty()) throw ValidationError("--out is required", "config");
  const io::RunConfig cfg = a.kernel.to_config();
  const Inputs in = load_inputs(a.in);
  const PairedFeatures phi = paired_features(in.image, in.text, cfg.kernel);
  const CovarianceBlocks b = blocks(phi.image, phi.text);
  const SchurDecomposition d = schur_decompose(phi.image, phi.text, decompose_options(cfg));

  Modifier m;
  m.gamma_star = d.gamma_star;
  m.kernel_config = phi.image.config;
  m.fitted_on = in.corpus;
  m.rel_cutoff = cfg.rel_cutoff;
  save_modifier(m, a.out);

  const Vector spec_ii = clamp_psd(eigvalsh(b.c_ii));
  std::ostringstream csv;
  csv << "component,index,eigenvalue\n";
  const auto emit = [&](const char* name, const Vector& s) {
    const auto kept = truncated_spectrum(s);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      csv << name << ',' << i << ',' << fmt(kept[i]) << '\n';
    }
  };
  emit("c_ii", spec_ii);
  emit("lambda_i", d.spectrum_i);
  emit("lambda_t", d.spectrum_t);
  io::write_file(a.out + ".spectra.csv", csv.str());

  json j = {{"trace_i", d.trace_i},
            {"trace_t", d.trace_t},
            {"raw_min_eigenvalue_i", d.raw_min_i},
            {"raw_min_eigenvalue_t", d.raw_min_t},
            {"n", b.n},
            {"feature_dim", b.dim()},
            {"kernel", std::string(to_string(phi.image.config.kind))},
            {"sigma", phi.image.config.sigma ? json(*phi.image.config.sigma) : json(nullptr)},
            {"rel_cutoff", cfg.rel_cutoff},
            {"ridge", cfg.ridge}};
  io::write_file(a.out + ".decomposition.json", j.dump(2) + "\n");
  log << "trace_i=" << fmt(d.trace_i) << " trace_t=" << fmt(d.trace_t) << "\n";
}

void run_modify(const ModifyArgs& a, std::ostream& log) {
  configure_threads();
  if (a.out.empty()) throw ValidationError("--out is required", "config");
  io::RunConfig cfg = a.kernel.to_config();
  std::optional<Modifier> prefit;
  if (!a.gamma.empty()) {
    prefit = load_modifier(a.gamma);
    cfg = config_with_modifier(cfg, *prefit);
  }
  const Inputs in = load_inputs(a.in);
  const PairedFeatures phi = paired_features(in.image, in.text, cfg.kernel);

  Matrix out;
  if (a.naive) {
    out = naive_modify_rows(phi.image.rows, phi.text.rows, cfg.renormalize);
  } else {
    const Modifier m = prefit ? *prefit
                              : fit_modifier(phi.image, phi.text, decompose_options(cfg),
                                             a.corpus.empty() ? in.corpus : a.corpus);
    if (!a.save_gamma.empty()) save_modifier(m, a.save_gamma);
    out = modify_rows(phi.image.rows, phi.text.rows, m, cfg.renormalize);
  }
  io::save_matrix(out, a.out);
  log << "wrote " << out.rows() << "x" << out.cols() << " modified features to " << a.out
      << "\n";
}

void run_retrieve(const RetrieveArgs& a, std::ostream& log) {
  configure_threads();
  if (a.out.empty() || a.query.empty() || a.gallery.empty()) {
    throw ValidationError("--query, --gallery and --out are required", "config");
  }
  io::RunConfig cfg = a.kernel.to_config();
  std::optional<Modifier> m;
  if (!a.gamma.empty()) {
    m = load_modifier(a.gamma);
    cfg = config_with_modifier(cfg, *m);
  }
  if ((m || a.naive) && a.query_text.empty()) {
    throw ValidationError("--gamma/--naive need --query-text", "config");
  }
  const Matrix gallery_raw = io::load_matrix(a.gallery);
  const Matrix query_raw = io::load_matrix(a.query);
  const KernelConfig kc = resolve_sigma(cfg.kernel, gallery_raw);
  const FeatureMatrix gallery = features(gallery_raw, kc);
  Matrix queries = features(query_raw, kc).rows;
  if (!a.query_text.empty() && (m || a.naive)) {
    const Matrix text = features(io::load_matrix(a.query_text), kc).rows;
    queries = a.naive ? naive_modify_rows(queries, text, cfg.renormalize)
                      : modify_rows(queries, text, *m, cfg.renormalize);
  }
  std::ostringstream csv;
  csv << "query,rank,index,score\n";
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    const auto hits = retrieve_topk(queries.row(q).transpose(), gallery.rows, a.k);
    for (std::size_t r = 0; r < hits.size(); ++r) {
      csv << q << ',' << r + 1 << ',' << hits[r].index << ',' << fmt(hits[r].score) << '\n';
    }
  }
  io::write_file(a.out, csv.str());
  log << "retrieved top-" << a.k << " for " << queries.rows() << " queries\n";
}

void run_cluster(const ClusterArgs& a, std::ostream& log) {
  configure_threads();
  if (a.out.empty()) throw ValidationError("--out is required", "config");
  io::RunConfig cfg = a.kernel.to_config();
  std::optional<Modifier> m;
  if (!a.gamma.empty()) {
    m = load_modifier(a.gamma);
    cfg = config_with_modifier(cfg, *m);
  }
  const Inputs in = load_inputs(a.in);
  const PairedFeatures phi = paired_features(in.image, in.text, cfg.kernel);
  ClusterAssignment c;
  if (a.which == "none") {
    c = kpca_clusters(phi.image, a.m, cfg.center);
  } else if (a.which == "model" || a.which == "text") {
    c = schur_clusters(phi.image, phi.text, a.m,
                       a.which == "model" ? SchurPart::kModel : SchurPart::kText,
                       decompose_options(cfg), m ? &*m : nullptr);
  } else {
    throw ValidationError("--which must be none, model or text", "config");
  }
  if (!c.warning.empty()) log << "warning: " << c.warning << "\n";
  io::write_file(a.out, clusters_to_json(c));
  log << "wrote " << c.labels.size() << " labels in " << c.cluster_count() << " clusters\n";
}

void run_sweep_command(const SweepArgs& a, std::ostream& log) {
  configure_threads();
  if (a.out.empty()) throw ValidationError("--out is required", "config");
  if (a.in.manifest.empty()) throw ValidationError("sweep needs a grouped --manifest", "config");
  const io::RunConfig cfg = a.kernel.to_config();
  const Inputs in = load_inputs(a.in);
  SweepSpec spec;
  spec.cumulative = !a.per_group;
  if (a.order.empty()) {
    spec.order = manifest_groups(in.manifest);
  } else {
    std::stringstream ss(a.order);
    std::string g;
    while (std::getline(ss, g, ',')) spec.order.push_back(g);
  }
  const auto rows = run_sweep(in.image, in.text, in.manifest, spec, cfg.kernel,
                              decompose_options(cfg), thread_cap());
  io::write_file(a.out, sweep_to_csv(rows));
  log << "wrote " << rows.size() << " sweep points to " << a.out << "\n";
}

void run_synth(const SynthArgs& a, std::ostream& log) {
  if (a.out.empty()) throw ValidationError("--out is required", "config");
  if (a.preset == "two-factor") {
    synth::TwoFactorSpec s;
    s.animals = a.clusters;
    s.fruits = a.modes;
    s.per_cell = a.per_mode;
    s.dim = a.dim;
    s.noise = a.noise;
    s.seed = a.seed;
    s.animal_salience.clear();
    for (int i = 0; i < a.clusters; ++i) s.animal_salience.push_back(1.0 - 0.4 * i / std::max(1, a.clusters));
    const auto c = synth::two_factor(s);
    synth::write_corpus(c.corpus, a.out);
    synth::write_corpus(c.reference, a.out + ".reference");
    log << "wrote " << c.corpus.image.rows() << " pairs and " << c.reference.image.rows()
        << " reference pairs under " << a.out << "\n";
    return;
  }
  synth::FactorialSpec s;
  if (a.preset == "factorial") {
    s.clusters = a.clusters;
    s.modes = a.modes;
    s.per_mode = a.per_mode;
    s.dim = a.dim;
    s.noise = a.noise;
    s.mode_weight = a.mode_weight;
    s.cluster_weight = a.cluster_weight;
    s.seed = a.seed;
    if (a.prompts == "in-prompt") {
      s.prompts = synth::PromptMode::kInPrompt;
    } else if (a.prompts == "generic") {
      s.prompts = synth::PromptMode::kGeneric;
    } else {
      throw ValidationError("--prompts must be in-prompt or generic", "config");
    }
  } else if (a.preset == "text-explained") {
    s = synth::text_explained_preset(a.clusters, a.per_mode, a.dim, a.seed);
  } else if (a.preset == "constant-text") {
    s = synth::constant_text_preset(a.modes, a.dim, a.seed);
  } else {
    throw ValidationError("unknown preset '" + a.preset + "'", "config");
  }
  const auto c = synth::factorial(s);
  synth::write_corpus(c, a.out);
  log << "wrote " << c.image.rows() << " pairs under " << a.out << "\n";
}

}  // namespace scendi::cli
