#include <doctest.h>

#include "fixtures.hpp"
#include "scendi/error.hpp"
#include "scendi/kernels.hpp"

using namespace scendi;

TEST_CASE("cosine features normalize rows") {
  Matrix e(2, 2);
  e << 3, 4, 0.6, 0.8;
  const FeatureMatrix phi = cosine_features(e);
  CHECK(phi.rows(0, 0) == doctest::Approx(0.6));
  CHECK(phi.rows(0, 1) == doctest::Approx(0.8));
  CHECK(phi.rows.row(1) == e.row(1));

  Matrix anti(2, 3);
  anti << 1, -2, 2, -1, 2, -2;
  const Matrix k = gram(cosine_features(anti));
  CHECK(k(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("cosine gram matches the direct formula") {
  const Matrix e = fixtures::gaussian(12, 7, 5);
  const Matrix k = gram(cosine_features(e));
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.rows(); ++j) {
      const double direct = e.row(i).dot(e.row(j)) / (e.row(i).norm() * e.row(j).norm());
      CHECK(std::abs(k(i, j) - direct) < 1e-12);
    }
  }
  CHECK(gram(cosine_features(Matrix::Constant(1, 3, 2.0)))(0, 0) == doctest::Approx(1.0));
  CHECK(gram(fixtures::as_features(fixtures::basis_rows(2, 4))).isIdentity());
}

TEST_CASE("invalid embeddings are rejected") {
  CHECK_THROWS_AS(cosine_features(Matrix(0, 3)), ValidationError);
  Matrix z = fixtures::gaussian(3, 2, 1);
  z.row(1).setZero();
  CHECK_THROWS_AS(cosine_features(z), ValidationError);
  z.row(1) << 1, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(cosine_features(z), ValidationError);

  FeatureMatrix bad{fixtures::gaussian(3, 4, 2), {}};
  CHECK_THROWS_AS(validate_features(bad), ValidationError);
}

TEST_CASE("kernel config validation") {
  KernelConfig c;
  c.kind = KernelKind::kGaussian;
  c.rff_dim = 7;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.rff_dim = 8;
  c.sigma = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(parse_kernel_kind("gaussian") == KernelKind::kGaussian);
  CHECK(to_string(KernelKind::kCosine) == "cosine");
  CHECK_THROWS_AS(parse_kernel_kind("rbf"), ValidationError);
}

TEST_CASE("random Fourier features have unit rows and are seeded") {
  const Matrix e = fixtures::gaussian(20, 5, 3);
  KernelConfig c;
  c.kind = KernelKind::kGaussian;
  c.rff_dim = 64;
  c.seed = 9;
  CHECK_THROWS_AS(features(e, c), ValidationError);
  c = resolve_sigma(c, e);
  const FeatureMatrix a = features(e, c);
  const FeatureMatrix b = features(e, c);
  CHECK(a.rows == b.rows);
  CHECK(a.dim() == 64);
  CHECK((a.rows.rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
  REQUIRE(a.config.sigma);
  CHECK(*a.config.sigma == doctest::Approx(median_pairwise_distance(e)));
  c.seed = 10;
  CHECK(features(e, c).rows != a.rows);
}

TEST_CASE("median pairwise distance") {
  Matrix e(3, 1);
  e << 0, 1, 3;  // distances 1, 2, 3
  CHECK(median_pairwise_distance(e) == 2.0);
  Matrix f(4, 1);
  f << 0, 1, 3, 7;  // 1 2 3 4 6 7
  CHECK(median_pairwise_distance(f) == 3.5);
  CHECK_THROWS_AS(median_pairwise_distance(Matrix::Ones(3, 2)), ValidationError);
}

TEST_CASE("RFF gram approximates the Gaussian kernel and is unbiased over seeds") {
  const Matrix e = fixtures::gaussian(10, 4, 8);
  const double sigma = 2.0;
  KernelConfig c;
  c.kind = KernelKind::kGaussian;
  c.sigma = sigma;
  c.rff_dim = 4000;
  Matrix mean = Matrix::Zero(10, 10);
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    c.seed = static_cast<std::uint64_t>(s);
    mean += gram(features(e, c));
  }
  mean /= seeds;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      worst = std::max(worst, std::abs(mean(i, j) - gaussian_kernel(e.row(i), e.row(j), sigma)));
    }
  }
  CHECK(worst < 0.01);
}

TEST_CASE("paired features share one map and bandwidth") {
  const Matrix img = fixtures::gaussian(15, 6, 1);
  const Matrix txt = fixtures::gaussian(15, 6, 2);
  KernelConfig c;
  c.kind = KernelKind::kGaussian;
  c.rff_dim = 32;
  const PairedFeatures p = paired_features(img, txt, c);
  CHECK(p.image.config == p.text.config);
  CHECK(*p.image.config.sigma == doctest::Approx(median_pairwise_distance(img)));
  CHECK(p.image.rows.row(3) == features(img, p.image.config).rows.row(3));
  const Matrix same = paired_features(img, img, c).text.rows;
  CHECK(same == paired_features(img, img, c).image.rows);
}
