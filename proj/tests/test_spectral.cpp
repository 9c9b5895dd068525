#include <doctest.h>

#include "fixtures.hpp"
#include "scendi/error.hpp"
#include "scendi/spectral.hpp"

using namespace scendi;

TEST_CASE("eigh of a 2x2 swap matrix") {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const auto es = eigh(a);
  CHECK(es.values(0) == doctest::Approx(1.0));
  CHECK(es.values(1) == doctest::Approx(-1.0));
}

TEST_CASE("eigh of the identity") {
  const auto es = eigh(Matrix::Identity(3, 3));
  CHECK((es.values.array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("eigh reconstructs a random symmetric matrix") {
  const Matrix a = fixtures::random_symmetric(5, 11);
  const auto es = eigh(a);
  const Matrix back = es.vectors * es.values.asDiagonal() * es.vectors.transpose();
  CHECK((back - a).norm() <= 1e-8);
  for (Eigen::Index i = 1; i < es.values.size(); ++i) CHECK(es.values(i - 1) >= es.values(i));
}

TEST_CASE("eigh sign convention and determinism") {
  const Matrix a = fixtures::random_symmetric(6, 3);
  const auto x = eigh(a);
  const auto y = eigh(a);
  CHECK(x.vectors == y.vectors);
  CHECK(x.values == y.values);
  for (Eigen::Index j = 0; j < x.vectors.cols(); ++j) {
    Eigen::Index first = 0;
    while (std::abs(x.vectors(first, j)) < 1e-12) ++first;
    CHECK(x.vectors(first, j) > 0.0);
  }
}

TEST_CASE("eigh rejects asymmetric or non-finite input") {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  CHECK_THROWS_AS(eigh(a), ValidationError);
  a << 1, std::nan(""), std::nan(""), 1;
  CHECK_THROWS_AS(eigvalsh(a), ValidationError);
  CHECK_THROWS_AS(eigh(Matrix(2, 3)), ValidationError);
}

TEST_CASE("eigh works in single precision") {
  Eigen::MatrixXf a(2, 2);
  a << 2, 1, 1, 2;
  const auto es = eigh(a);
  CHECK(es.values(0) == doctest::Approx(3.0f));
  CHECK(es.values(1) == doctest::Approx(1.0f));
}

TEST_CASE("clamp_psd") {
  Vector v(2);
  v << 0.5, 1e-14;
  CHECK(clamp_psd(v) == v);
  v << 0.5, -1e-12;
  const Vector c = clamp_psd(v);
  CHECK(c(0) == 0.5);
  CHECK(c(1) == 0.0);
  v << 0.5, -0.1;
  CHECK_THROWS_AS(clamp_psd(v), NumericalError);
  try {
    clamp_psd(v);
  } catch (const Error& e) {
    CHECK(e.kind() == "psd_violation");
    CHECK(e.code() == ExitCode::kNumerical);
  }
}

TEST_CASE("pseudoinverse") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const Matrix p = pseudoinverse(d);
  CHECK(p(0, 0) == doctest::Approx(0.5));
  CHECK(p(1, 1) == 0.0);
  CHECK((pseudoinverse(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() < 1e-14);

  Vector u = fixtures::gaussian(5, 1, 4).col(0).normalized();
  const Matrix uu = u * u.transpose();
  const Matrix pu = pseudoinverse(uu);
  CHECK((uu * pu * uu - uu).norm() < 1e-12);
  CHECK((pu - uu).norm() < 1e-12);
  CHECK(pseudoinverse(Matrix::Zero(3, 3)).isZero());
}

TEST_CASE("pseudoinverse satisfies the Penrose conditions on a rank-deficient matrix") {
  const Matrix x = fixtures::gaussian(7, 3, 9);
  const Matrix a = x * x.transpose();  // rank 3 in 7 dims
  const Matrix p = pseudoinverse(a);
  CHECK((a * p * a - a).norm() < 1e-9 * a.norm());
  CHECK((p * a * p - p).norm() < 1e-9 * p.norm());
  CHECK((a * p - (a * p).transpose()).norm() < 1e-9);
}

TEST_CASE("matrix_entropy") {
  Vector v(3);
  v << 1, 0, 0;
  CHECK(matrix_entropy(v) == 0.0);
  Vector h(2);
  h << 0.5, 0.5;
  CHECK(matrix_entropy(h) == doctest::Approx(0.693147180559945).epsilon(1e-14));
  v << 0.7, 0.2, 0.1;
  CHECK(std::abs(matrix_entropy(v) - 0.801818552543337308560798) < 1e-14);
  v << 0.7, 0.2, -0.1;
  CHECK_THROWS_AS(matrix_entropy(v), ValidationError);
  v << 0.7, 0.2, 0.2;
  CHECK_THROWS_AS(matrix_entropy(v), ValidationError);
}

TEST_CASE("gram duality: nonzero spectra of X^T X and X X^T agree") {
  const Matrix x = fixtures::gaussian(6, 10, 21);
  const Vector a = eigvalsh(Matrix(x.transpose() * x));
  const Vector b = eigvalsh(Matrix(x * x.transpose()));
  for (Eigen::Index i = 0; i < b.size(); ++i) CHECK(std::abs(a(i) - b(i)) < 1e-9 * a(0));
  for (Eigen::Index i = b.size(); i < a.size(); ++i) CHECK(std::abs(a(i)) < 1e-9 * a(0));
}
