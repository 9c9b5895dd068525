#include <doctest.h>

#include "fixtures.hpp"
#include "scendi/error.hpp"
#include "scendi/scores.hpp"
#include "scendi/sweep.hpp"
#include "scendi/synth.hpp"

using namespace scendi;

TEST_CASE("factorial corpus shape and labels") {
  synth::FactorialSpec s;
  s.clusters = 2;
  s.modes = 3;
  s.per_mode = 4;
  s.dim = 16;
  s.seed = 1;
  const synth::PairedCorpus c = synth::factorial(s);
  CHECK(c.image.rows() == 24);
  CHECK(c.image.cols() == 16);
  CHECK(c.text.rows() == 24);
  CHECK(c.manifest.records.size() == 24);
  CHECK(*c.manifest.records[0].group == "c0");
  CHECK(*c.manifest.records[23].group == "c1");
  CHECK(c.cluster[23] == 1);
  io::validate_manifest(c.manifest, 24, 24);
  const synth::PairedCorpus again = synth::factorial(s);
  CHECK(again.image == c.image);
  CHECK(again.text == c.text);
  s.dim = 8;
  CHECK_THROWS_AS(synth::factorial(s), ValidationError);
}

TEST_CASE("in-prompt texts differ per cluster, generic texts do not") {
  synth::FactorialSpec s;
  s.clusters = 3;
  s.per_mode = 2;
  s.seed = 4;
  const synth::PairedCorpus in = synth::factorial(s);
  CHECK(in.text.row(0) == in.text.row(1));
  CHECK(in.text.row(0) != in.text.row(in.text.rows() - 1));
  s.prompts = synth::PromptMode::kGeneric;
  const synth::PairedCorpus gen = synth::factorial(s);
  CHECK(gen.text.row(0) == gen.text.row(gen.text.rows() - 1));
  CHECK(gen.image == in.image);
}

TEST_CASE("text-explained and constant-text presets reach their closed forms") {
  const synth::PairedCorpus te = synth::factorial(synth::text_explained_preset(4, 1, 16, 2));
  const DiversityReport a = evaluate(cosine_features(te.image), cosine_features(te.text));
  CHECK(a.scendi_i == doctest::Approx(1.0));
  CHECK(std::abs(a.trace_i) < 1e-9);

  const synth::PairedCorpus ct = synth::factorial(synth::constant_text_preset(5, 16, 3));
  const DiversityReport b = evaluate(cosine_features(ct.image), cosine_features(ct.text));
  CHECK(std::abs(b.scendi_i - 3.031433133020796) < 1e-6);
}

TEST_CASE("two-factor corpus") {
  synth::TwoFactorSpec s;
  s.seed = 2;
  const synth::TwoFactorCorpus t = synth::two_factor(s);
  CHECK(t.corpus.image.rows() == 3 * 3 * 20);
  CHECK(t.reference.image.rows() == 3 * 30);
  CHECK(t.corpus.cluster[0] == 0);
  CHECK(t.corpus.mode.size() == t.corpus.cluster.size());
}

TEST_CASE("write_corpus produces loadable files") {
  fixtures::TempDir dir("corpus");
  synth::FactorialSpec s;
  s.per_mode = 2;
  const synth::PairedCorpus c = synth::factorial(s);
  synth::write_corpus(c, dir / "fx");
  const io::PairManifest m = io::load_manifest(dir / "fx.manifest.json");
  CHECK(m.records == c.manifest.records);
  CHECK(io::load_matrix(*m.image_matrix) == c.image);
  CHECK(io::load_matrix(*m.text_matrix) == c.text);
}

namespace {

synth::PairedCorpus sweep_corpus(synth::PromptMode p) {
  synth::FactorialSpec s;
  s.clusters = 4;
  s.modes = 3;
  s.per_mode = 10;
  s.dim = 24;
  s.prompts = p;
  s.seed = 9;
  return synth::factorial(s);
}

}  // namespace

TEST_CASE("sweep validation") {
  const synth::PairedCorpus c = sweep_corpus(synth::PromptMode::kInPrompt);
  CHECK(manifest_groups(c.manifest) == std::vector<std::string>{"c0", "c1", "c2", "c3"});
  CHECK_THROWS_AS(validate_sweep(c.manifest, {{"c0", "c1"}}), ValidationError);
  CHECK_THROWS_AS(validate_sweep(c.manifest, {{"c0", "c1", "c2", "c2"}}), ValidationError);
  CHECK_THROWS_AS(validate_sweep(c.manifest, {{"c0", "c1", "c2", "zz"}}), ValidationError);
  io::PairManifest bare = c.manifest;
  bare.records[3].group.reset();
  CHECK_THROWS_AS(manifest_groups(bare), ValidationError);
}

TEST_CASE("single-group sweep equals a direct evaluation") {
  synth::FactorialSpec s;
  s.clusters = 1;
  s.per_mode = 10;
  s.seed = 3;
  const synth::PairedCorpus c = synth::factorial(s);
  KernelConfig k;
  k.kind = KernelKind::kGaussian;
  k.rff_dim = 200;
  const auto rows = run_sweep(c.image, c.text, c.manifest, {{"c0"}}, k);
  REQUIRE(rows.size() == 1);
  const PairedFeatures phi = paired_features(c.image, c.text, k);
  const DiversityReport r = evaluate(phi.image, phi.text);
  CHECK(rows[0].vendi == r.vendi);
  CHECK(rows[0].scendi_i == r.scendi_i);
  CHECK(rows[0].scendi_t == r.scendi_t);
  CHECK(rows[0].trace_i == r.trace_i);
}

TEST_CASE("sweep results do not depend on the thread count") {
  const synth::PairedCorpus c = sweep_corpus(synth::PromptMode::kInPrompt);
  const SweepSpec spec{{"c0", "c1", "c2", "c3"}, true};
  KernelConfig k;
  const auto one = run_sweep(c.image, c.text, c.manifest, spec, k, {}, 1);
  const auto four = run_sweep(c.image, c.text, c.manifest, spec, k, {}, 4);
  CHECK(sweep_to_csv(one) == sweep_to_csv(four));
  CHECK(one.back().group_count == 4);
  CHECK(one.back().group == "c3");
}

TEST_CASE("per-group sweep scores each group alone") {
  const synth::PairedCorpus c = sweep_corpus(synth::PromptMode::kGeneric);
  const auto rows = run_sweep(c.image, c.text, c.manifest, {{"c2", "c0", "c1", "c3"}, false},
                              KernelConfig{});
  const auto first = run_sweep(c.image.topRows(30), c.text.topRows(30),
                               io::PairManifest{{c.manifest.records.begin(),
                                                 c.manifest.records.begin() + 30},
                                                std::nullopt, std::nullopt},
                               {{"c0"}}, KernelConfig{});
  CHECK(rows[1].group == "c0");
  CHECK(rows[1].vendi == first[0].vendi);
}

TEST_CASE("sweep CSV layout") {
  SweepRow r;
  r.group_count = 1;
  r.group = "g";
  r.vendi = 0.1;
  const std::string csv = sweep_to_csv({r});
  CHECK(csv.rfind("group_count,vendi,rke,scendi_i,scendi_t,trace_i,group\n", 0) == 0);
  CHECK(csv.find("1,0.10000000000000001,1,1,1,0,g\n") != std::string::npos);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {5, 5, 5}) == 0.0);
  CHECK(spearman({1, 2, 3, 4, 5}, {5, 4, 1, 2, 3}) == doctest::Approx(-0.6));
  CHECK(spearman({1, 2, 3, 4}, {1, 2, 2, 3}) == doctest::Approx(0.9486832980505138));
  CHECK_THROWS_AS(spearman({1}, {1}), ValidationError);
}
