#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "scendi/embed_edit.hpp"
#include "scendi/error.hpp"
#include "scendi/io.hpp"

using namespace scendi;
using fixtures::as_features;

TEST_CASE("self-regression modifier maps texts to themselves") {
  const Matrix t = fixtures::unit_rows(fixtures::gaussian(12, 4, 1));
  const Modifier m = fit_modifier(as_features(t), as_features(t));
  CHECK((t * m.gamma_star.transpose() - t).norm() < 1e-10);
  const Vector x = t.row(3).transpose();
  CHECK(modify(x, x, m).norm() < 1e-10);
}

TEST_CASE("uncorrelated modalities give a zero modifier") {
  const auto u = fixtures::uncorrelated(4, 6, 1);
  const Modifier m = fit_modifier(as_features(u.image), as_features(u.text));
  CHECK(m.gamma_star.norm() < 1e-12);
  const Vector x = fixtures::gaussian(6, 1, 3).col(0);
  CHECK((modify(x, Vector::Ones(6), m) - x).norm() < 1e-12);
  Modifier zero = m;
  zero.gamma_star.setZero();
  CHECK(modify(x, Vector::Ones(6), zero) == x);
}

TEST_CASE("constant-text modifier subtracts the mean image feature") {
  const Matrix i = fixtures::unit_rows(fixtures::gaussian(9, 5, 2));
  Matrix t = Matrix::Zero(9, 5);
  t.rowwise() = fixtures::unit_rows(fixtures::gaussian(1, 5, 3)).row(0);
  const Modifier m = fit_modifier(as_features(i), as_features(t));
  const Vector mean = i.colwise().mean().transpose();
  const Vector tt = t.row(0).transpose();
  CHECK((m.gamma_star * tt - mean).norm() < 1e-12);
  const Vector x = i.row(4).transpose();
  CHECK((modify(x, tt, m) - (x - mean)).norm() < 1e-12);
}

TEST_CASE("modified residuals are decorrelated from the prompts, naive ones are not") {
  const auto c = fixtures::correlated(40, 6, 17);
  const Modifier m = fit_modifier(c.image, c.text);
  const Matrix r = modify_rows(c.image.rows, c.text.rows, m);
  CHECK((r.transpose() * c.text.rows / 40.0).norm() < 1e-10);
  const Matrix naive = naive_modify_rows(c.image.rows, c.text.rows);
  CHECK((naive.transpose() * c.text.rows / 40.0).norm() > 1e-3);
  for (Eigen::Index k = 0; k < 40; ++k) {
    const Vector row = modify(c.image.rows.row(k).transpose(), c.text.rows.row(k).transpose(), m);
    CHECK((row - r.row(k).transpose()).norm() < 1e-14);
  }
}

TEST_CASE("naive subtraction") {
  Vector a(3), b(3);
  a << 1, 0, 0;
  b << 0, 1, 0;
  CHECK(naive_modify(a, a).isZero());
  CHECK(naive_modify(a, b).norm() == doctest::Approx(std::sqrt(2.0)));
  CHECK(naive_modify(a, b, true).norm() == doctest::Approx(1.0));
  CHECK(naive_modify(a, a, true).isZero());
}

TEST_CASE("modifier dimension mismatch") {
  const auto c = fixtures::correlated(10, 4, 3);
  const Modifier m = fit_modifier(c.image, c.text);
  CHECK_THROWS_AS(modify(Vector::Ones(5), Vector::Ones(5), m), ValidationError);
}

TEST_CASE("modifier save and load round trip") {
  fixtures::TempDir dir("modifier");
  const auto c = fixtures::correlated(15, 5, 23);
  Modifier m = fit_modifier(c.image, c.text, {}, "corpus-a");
  m.kernel_config.kind = KernelKind::kGaussian;
  m.kernel_config.sigma = 0.123456789012345678;
  m.kernel_config.seed = 42;
  save_modifier(m, dir / "fit");
  CHECK(std::filesystem::exists(dir / "fit.gamma.npy"));
  CHECK(std::filesystem::exists(dir / "fit.gamma.json"));
  const Modifier back = load_modifier(dir / "fit");
  CHECK(back.gamma_star == m.gamma_star);
  CHECK(back.kernel_config == m.kernel_config);
  CHECK(back.fitted_on == "corpus-a");
  CHECK(back.rel_cutoff == m.rel_cutoff);
  const Matrix a = modify_rows(c.image.rows, c.text.rows, m);
  const Matrix b = modify_rows(c.image.rows, c.text.rows, back);
  CHECK(a == b);
  CHECK(modifier_npy_path(dir / "fit.gamma.npy") == dir / "fit.gamma.npy");
  CHECK(modifier_json_path(dir / "fit.gamma.json") == dir / "fit.gamma.json");
}

TEST_CASE("loading a broken modifier fails cleanly") {
  fixtures::TempDir dir("badmod");
  io::write_npy(Matrix::Identity(3, 3), dir / "m.gamma.npy");
  io::write_file(dir / "m.gamma.json", "{\"kernel\": \"cosine\"}");
  CHECK_THROWS_AS(load_modifier(dir / "m"), ValidationError);
  CHECK_THROWS_AS(load_modifier(dir / "missing"), IoError);
}

TEST_CASE("retrieval closed forms") {
  const Matrix g = fixtures::unit_rows(fixtures::gaussian(10, 4, 5));
  const auto hits = retrieve_topk(g.row(7).transpose(), g, 3);
  CHECK(hits[0].index == 7);
  CHECK(hits[0].score == doctest::Approx(1.0));

  Matrix flat = Matrix::Zero(6, 4);
  flat.leftCols(3) = fixtures::gaussian(6, 3, 1);
  Vector q = Vector::Zero(4);
  q(3) = 1.0;
  const auto ties = retrieve_topk(q, flat, 4);
  for (std::size_t r = 0; r < ties.size(); ++r) {
    CHECK(ties[r].index == static_cast<Eigen::Index>(r));
    CHECK(ties[r].score == 0.0);
  }
  CHECK_THROWS_AS(retrieve_topk(q, flat, 7), ValidationError);
  CHECK_THROWS_AS(retrieve_topk(q, flat, 0), ValidationError);
}

TEST_CASE("retrieval matches an exhaustive scan") {
  const Matrix g = fixtures::gaussian(100, 8, 31);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector q = fixtures::gaussian(8, 1, 500 + trial).col(0);
    std::vector<std::pair<double, Eigen::Index>> all;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      all.emplace_back(-g.row(i).dot(q) / (g.row(i).norm() * q.norm()), i);
    }
    std::sort(all.begin(), all.end());
    const auto hits = retrieve_topk(q, g, 10);
    for (std::size_t r = 0; r < 10; ++r) {
      CHECK(hits[r].index == all[r].second);
      CHECK(hits[r].score == -all[r].first);
    }
  }
}
