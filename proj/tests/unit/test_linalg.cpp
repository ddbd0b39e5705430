#include <doctest.h>

#include "driftlab/linalg.hpp"

using namespace driftlab;

TEST_SUITE("linalg") {

TEST_CASE("exact solve of a 2x2 system") {
  DenseMatrix<Rational> a(2, 2), b(2, 1);
  a(0, 0) = Rational(2, 5);
  a(1, 1) = Rational(1, 2);
  a(0, 1) = Rational(-3, 10);
  b(0, 0) = 1;
  b(1, 0) = 1;
  const auto x = solve(a, b);
  CHECK(x(0, 0) == 4);
  CHECK(x(1, 0) == 2);
}

TEST_CASE("zero leading pivot needs a row swap") {
  DenseMatrix<Rational> a(2, 2), b(2, 2);
  a(0, 1) = 1;
  a(1, 0) = 1;
  b(0, 0) = 5;
  b(1, 1) = 7;
  const auto x = solve(a, b);
  CHECK(x(1, 0) == 5);
  CHECK(x(0, 1) == 7);
  CHECK(x(0, 0) == 0);
}

TEST_CASE("float solve matches the rational one") {
  DenseMatrix<Rational> a(3, 3), b(3, 1);
  DenseMatrix<double> af(3, 3), bf(3, 1);
  const long v[3][3] = {{4, -1, 0}, {-1, 4, -1}, {0, -1, 4}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      a(i, j) = v[i][j];
      af(i, j) = static_cast<double>(v[i][j]);
    }
    b(i, 0) = i + 1;
    bf(i, 0) = i + 1;
  }
  const auto x = solve(a, b);
  const auto xf = solve(af, bf);
  for (int i = 0; i < 3; ++i) CHECK(xf(i, 0) == doctest::Approx(x(i, 0).get_d()).epsilon(1e-14));
}

TEST_CASE("singular systems are reported") {
  DenseMatrix<Rational> a(2, 2), b(2, 1);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 2;
  a(1, 1) = 4;
  CHECK_THROWS_AS(solve(a, b), AnalysisError);
  DenseMatrix<double> af(2, 2), bf(2, 1);
  af(0, 0) = 1;
  CHECK_THROWS_AS(solve(af, bf), AnalysisError);
}

}
