#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "dts/errors.hpp"
#include "dts/ksvd.hpp"

using namespace dts;

namespace {

struct Planted {
  Matrix dictionary;
  Matrix training;
};

// 1-sparse training set that uses every atom.
Planted planted_one_sparse(Index bands, Index atoms, Index samples, std::mt19937_64& rng) {
  Planted p;
  p.dictionary = oracle::incoherent_dictionary(bands, atoms, 0.8, rng);
  p.training = Matrix::Zero(bands, samples);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution sign(0.5);
  for (Index j = 0; j < samples; ++j) {
    const double c = sign(rng) ? mag(rng) : -mag(rng);
    p.training.col(j) = c * p.dictionary.col(j % atoms);
  }
  return p;
}

}  // namespace

TEST_CASE("init_dictionary returns normalized, distinct atoms") {
  std::mt19937_64 rng(3);
  Matrix training = oracle::random_gaussian(5, 20, rng);
  training.col(3).setZero();
  training.col(7) = 4.0 * training.col(2);
  const auto d = init_dictionary(training, 10, 42);
  CHECK(d.atoms() == 10);
  CHECK_FALSE(dictionary_violation(d.columns()).has_value());
  CHECK(init_dictionary(training, 10, 42).columns() == d.columns());
}

TEST_CASE("init_dictionary fills up with random atoms when columns run out") {
  Matrix training = Matrix::Zero(4, 3);
  training(0, 0) = 1.0;
  training(0, 1) = 2.0;  // parallel to column 0
  const auto d = init_dictionary(training, 5, 1);
  CHECK(d.atoms() == 5);
  CHECK_THROWS_WITH_AS(init_dictionary(Matrix::Zero(4, 3), 2, 1), doctest::Contains("no usable training columns"),
                       InvariantError);
}

TEST_CASE("ksvd with zero iterations returns the initialization") {
  std::mt19937_64 rng(5);
  const Matrix training = oracle::random_gaussian(6, 30, rng);
  KsvdConfig cfg;
  cfg.atoms = 8;
  cfg.iterations = 0;
  cfg.seed = 77;
  const auto r = ksvd(training, cfg);
  CHECK(r.dictionary.columns() == init_dictionary(training, 8, 77).columns());
  CHECK(r.residual_trace.empty());
}

TEST_CASE("ksvd recovers a planted 1-sparse dictionary") {
  std::mt19937_64 rng(12);
  const auto p = planted_one_sparse(8, 5, 40, rng);
  KsvdConfig cfg;
  cfg.atoms = 5;
  cfg.sparsity = {1, 0.0};
  cfg.iterations = 30;
  cfg.seed = 3;
  const auto r = ksvd(p.training, cfg);
  CHECK(oracle::greedy_match_max_angle(r.dictionary.columns(), p.dictionary) < 1e-3);
  for (std::size_t t = 1; t < r.residual_trace.size(); ++t) {
    CHECK(r.residual_trace[t] <= r.residual_trace[t - 1] + 1e-9);
  }
}

TEST_CASE("ksvd invariants hold on random data") {
  std::mt19937_64 rng(31);
  const Matrix training = oracle::random_gaussian(10, 60, rng);
  KsvdConfig cfg;
  cfg.atoms = 12;
  cfg.sparsity = {3, 0.0};
  cfg.iterations = 10;
  const auto r = ksvd(training, cfg);
  CHECK_FALSE(dictionary_violation(r.dictionary.columns()).has_value());
  CHECK_NOTHROW(check_coefficients(r.codes));
  CHECK(r.residual_trace.size() == 10);
  const double final_residual = (training - r.dictionary.columns() * r.codes.values).norm();
  CHECK(final_residual == doctest::Approx(r.residual_trace.back()).epsilon(1e-9));
  for (Index k = 0; k < r.dictionary.atoms(); ++k) {
    Index at = 0;
    r.dictionary.columns().col(k).cwiseAbs().maxCoeff(&at);
    CHECK(r.dictionary.columns()(at, k) > 0.0);
  }
}

TEST_CASE("ksvd is deterministic and seed dependent") {
  std::mt19937_64 rng(8);
  const Matrix training = oracle::random_gaussian(6, 40, rng);
  KsvdConfig cfg;
  cfg.atoms = 8;
  cfg.iterations = 5;
  const auto a = ksvd(training, cfg);
  const auto b = ksvd(training, cfg);
  CHECK(a.dictionary.columns() == b.dictionary.columns());
  cfg.seed = 2;
  CHECK(ksvd(training, cfg).dictionary.columns() != a.dictionary.columns());
}

TEST_CASE("ksvd flags more atoms than samples") {
  std::mt19937_64 rng(10);
  const Matrix training = oracle::random_gaussian(6, 4, rng);
  KsvdConfig cfg;
  cfg.atoms = 6;
  cfg.iterations = 3;
  const auto r = ksvd(training, cfg);
  CHECK(r.more_atoms_than_samples);
  CHECK_FALSE(dictionary_violation(r.dictionary.columns()).has_value());
}
