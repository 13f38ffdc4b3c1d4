#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "dts/errors.hpp"
#include "dts/types.hpp"

using namespace dts;

TEST_CASE("validate_cube accepts a zero cube") {
  const SpectralCube cube(3, 2, 2);
  CHECK(validate_cube(cube).ok());
}

TEST_CASE("validate_cube reports a length mismatch") {
  SpectralCube cube(3, 2, 2);
  cube.data.resize(11);
  const auto report = validate_cube(cube);
  CHECK_FALSE(report.ok());
  CHECK(report.has("length mismatch"));
}

TEST_CASE("validate_cube names the first non-finite index") {
  SpectralCube cube(3, 2, 2);
  cube.data[5] = std::numeric_limits<double>::quiet_NaN();
  cube.data[9] = std::numeric_limits<double>::infinity();
  const auto report = validate_cube(cube);
  REQUIRE(report.has("non-finite value"));
  CHECK(report.violations.back().index == 5u);
  CHECK(report.summary().find("index 5") != std::string::npos);
}

TEST_CASE("validate_cube mutation: every violation class is detected") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpectralCube base(4, 3, 5);
  for (auto& v : base.data) v = u(rng);
  REQUIRE(validate_cube(base).ok());

  SpectralCube zero_dim = base;
  zero_dim.rows = 0;
  CHECK(validate_cube(zero_dim).has("zero dimension"));

  SpectralCube longer = base;
  longer.data.push_back(0.0);
  CHECK(validate_cube(longer).has("length mismatch"));

  for (double bad : {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()}) {
    SpectralCube c = base;
    const std::size_t at = rng() % c.data.size();
    c.data[at] = bad;
    const auto report = validate_cube(c);
    REQUIRE(report.has("non-finite value"));
    CHECK(report.violations.back().index == at);
  }
}

TEST_CASE("as_matrix puts pixel spectra in columns, row-major pixels") {
  const SpectralCube cube(2, 1, 2, {1, 2, 3, 4});
  const Matrix m = as_matrix(cube);
  Matrix expected(2, 2);
  expected << 1, 2, 3, 4;
  CHECK(m == expected);

  const SpectralCube single(1, 1, 1, {7});
  CHECK(as_matrix(single) == Matrix::Constant(1, 1, 7.0));

  // band 0 of a 1x... 2x3 cube: pixel (r, c) -> column r * 3 + c
  SpectralCube grid(1, 2, 3, {0, 1, 2, 10, 11, 12});
  CHECK(as_matrix(grid)(0, 4) == 11);
}

TEST_CASE("as_matrix and from_matrix are inverse bijections") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t b = 1 + rng() % 6, r = 1 + rng() % 5, c = 1 + rng() % 5;
    SpectralCube cube(b, r, c);
    for (auto& v : cube.data) v = n(rng);
    const SpectralCube back = from_matrix(as_matrix(cube), r, c);
    CHECK(back.same_shape(cube));
    CHECK(back.data == cube.data);

    Matrix m(static_cast<Index>(b), static_cast<Index>(r * c));
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    CHECK(as_matrix(from_matrix(m, r, c)) == m);
  }
}

TEST_CASE("as_matrix rejects inconsistent cubes") {
  SpectralCube cube(2, 2, 2);
  cube.data.pop_back();
  CHECK_THROWS_AS(as_matrix(cube), ShapeError);
  CHECK_THROWS_AS(from_matrix(Matrix::Zero(2, 5), 2, 2), ShapeError);
}

TEST_CASE("SpectralResponse invariants") {
  Matrix ok(2, 4);
  ok << 0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5;
  CHECK_NOTHROW(SpectralResponse(ok, true));

  CHECK_THROWS_AS(SpectralResponse{Matrix::Constant(4, 4, 0.25)}, InvariantError);  // not reducing
  Matrix negative = ok;
  negative(0, 0) = -0.1;
  CHECK_THROWS_AS(SpectralResponse{negative}, InvariantError);
  Matrix empty_row = ok;
  empty_row.row(1).setZero();
  CHECK_THROWS_AS(SpectralResponse{empty_row}, InvariantError);
  Matrix unnormalized = ok;
  unnormalized(0, 0) = 1.0;
  CHECK_NOTHROW(SpectralResponse(unnormalized, false));
  CHECK_THROWS_AS((SpectralResponse{unnormalized, true}), InvariantError);
}

TEST_CASE("SpectralDictionary invariants") {
  CHECK_NOTHROW(SpectralDictionary(Matrix::Identity(4, 4)));

  Matrix scaled = Matrix::Identity(3, 2);
  scaled(0, 0) = 1.0 + 1e-6;
  CHECK_THROWS_AS(SpectralDictionary{scaled}, InvariantError);

  Matrix dup(3, 2);
  dup << 1, -1, 0, 0, 0, 0;
  CHECK_THROWS_AS(SpectralDictionary{dup}, InvariantError);

  Matrix zero = Matrix::Identity(3, 2);
  zero.col(1).setZero();
  CHECK_THROWS_AS(SpectralDictionary::from_unnormalized(zero), InvariantError);

  Matrix raw(2, 2);
  raw << 3, 0, 4, 2;
  const auto d = SpectralDictionary::from_unnormalized(raw);
  CHECK(d.atom(0)(0) == doctest::Approx(0.6));
  CHECK(d.atom(1)(1) == doctest::Approx(1.0));
}

TEST_CASE("check_coefficients enforces the sparsity budget") {
  CoefficientMatrix codes{Matrix::Zero(4, 3), Index{1}, {}};
  codes.values(0, 0) = 1.0;
  CHECK_NOTHROW(check_coefficients(codes));
  codes.values(2, 0) = 1.0;
  CHECK_THROWS_AS(check_coefficients(codes), InvariantError);
  codes.sparsity_budget.reset();
  CHECK_NOTHROW(check_coefficients(codes));
  codes.values(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(check_coefficients(codes), InvariantError);
}
