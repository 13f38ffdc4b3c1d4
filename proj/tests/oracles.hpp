#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Plain triple loop, no Eigen products.
inline Matrix triple_loop_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

// Normal-equations least squares on a fixed support.
inline Vector support_least_squares(const Matrix& dict, const std::vector<Index>& support,
                                    const Vector& signal) {
  Matrix sub(dict.rows(), static_cast<Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) sub.col(static_cast<Index>(i)) = dict.col(support[i]);
  const Vector c = (sub.transpose() * sub).ldlt().solve(sub.transpose() * signal);
  Vector full = Vector::Zero(dict.cols());
  for (std::size_t i = 0; i < support.size(); ++i) full(support[i]) = c(static_cast<Index>(i));
  return full;
}

struct BestSparse {
  std::vector<Index> support;
  Vector coefficients;
  double residual = std::numeric_limits<double>::infinity();
};

// Exhaustive search over every support of the given size.
inline BestSparse exhaustive_sparse_fit(const Matrix& dict, const Vector& signal, int size) {
  BestSparse best;
  std::vector<Index> idx(static_cast<std::size_t>(size));
  const Index n = dict.cols();
  // Enumerate combinations in lexicographic order.
  for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    const Vector c = support_least_squares(dict, idx, signal);
    const double r = (signal - dict * c).norm();
    if (r < best.residual) {
      best = {idx, c, r};
    }
    int pos = size - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - size + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

inline double mutual_coherence(const Matrix& unit_columns) {
  double mu = 0.0;
  for (Index a = 0; a < unit_columns.cols(); ++a) {
    for (Index b = a + 1; b < unit_columns.cols(); ++b) {
      mu = std::max(mu, std::abs(unit_columns.col(a).dot(unit_columns.col(b))));
    }
  }
  return mu;
}

inline Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

inline Matrix random_unit_columns(Index rows, Index cols, std::mt19937_64& rng) {
  Matrix m = random_gaussian(rows, cols, rng);
  for (Index j = 0; j < cols; ++j) m.col(j).normalize();
  return m;
}

// Random unit-column dictionary whose mutual coherence is below `limit`,
// built by rejection of individual columns. Only practical well above the
// Welch bound.
inline Matrix incoherent_dictionary(Index rows, Index cols, double limit, std::mt19937_64& rng) {
  Matrix d(rows, cols);
  Index filled = 0;
  std::normal_distribution<double> n(0.0, 1.0);
  while (filled < cols) {
    Vector v(rows);
    for (Index i = 0; i < rows; ++i) v(i) = n(rng);
    v.normalize();
    bool ok = true;
    for (Index k = 0; k < filled && ok; ++k) ok = std::abs(d.col(k).dot(v)) < limit;
    if (ok) d.col(filled++) = v;
  }
  return d;
}

// Sylvester-Hadamard matrix of order 2^m.
inline Matrix hadamard(Index order) {
  Matrix h = Matrix::Ones(1, 1);
  while (h.rows() < order) {
    const Index n = h.rows();
    Matrix next(2 * n, 2 * n);
    next << h, h, h, -h;
    h = next;
  }
  return h;
}

// [I, H / sqrt(n)] under a random rotation, with shuffled and sign-flipped
// columns. Coherence is exactly 1/sqrt(n); n must be a power of two.
inline Matrix rotated_identity_hadamard(Index n, std::mt19937_64& rng) {
  Matrix base(n, 2 * n);
  base << Matrix::Identity(n, n), hadamard(n) / std::sqrt(static_cast<double>(n));
  const Matrix rotation = Eigen::HouseholderQR<Matrix>(random_gaussian(n, n, rng)).householderQ();
  std::vector<Index> order(static_cast<std::size_t>(2 * n));
  for (Index i = 0; i < 2 * n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution flip(0.5);
  Matrix out(n, 2 * n);
  for (Index j = 0; j < 2 * n; ++j) {
    out.col(j) = rotation * base.col(order[static_cast<std::size_t>(j)]) * (flip(rng) ? -1.0 : 1.0);
  }
  return out;
}

// Plain gradient descent with a fixed step 1 / Lipschitz on a smooth convex
// quadratic f, run until ||grad|| < tol.
template <class Grad>
Matrix gradient_descent(Matrix x, Grad grad, double lipschitz, double tol, int max_iters = 2000000) {
  const double step = 1.0 / lipschitz;
  for (int it = 0; it < max_iters; ++it) {
    const Matrix g = grad(x);
    if (g.norm() < tol) break;
    x -= step * g;
  }
  return x;
}

// Angle in radians between two vectors, sign-insensitive.
inline double unsigned_angle(const Vector& a, const Vector& b) {
  const double c = std::min(1.0, std::abs(a.dot(b)) / (a.norm() * b.norm()));
  return std::acos(c);
}

// Greedy one-to-one matching of learned atoms to reference atoms by the
// smallest unsigned angle. Returns the worst matched angle.
inline double greedy_match_max_angle(const Matrix& learned, const Matrix& reference) {
  std::vector<bool> used_l(static_cast<std::size_t>(learned.cols()), false);
  std::vector<bool> used_r(static_cast<std::size_t>(reference.cols()), false);
  double worst = 0.0;
  for (Index round = 0; round < reference.cols(); ++round) {
    double best = std::numeric_limits<double>::infinity();
    Index bl = -1;
    Index br = -1;
    for (Index l = 0; l < learned.cols(); ++l) {
      if (used_l[static_cast<std::size_t>(l)]) continue;
      for (Index r = 0; r < reference.cols(); ++r) {
        if (used_r[static_cast<std::size_t>(r)]) continue;
        const double a = unsigned_angle(learned.col(l), reference.col(r));
        if (a < best) {
          best = a;
          bl = l;
          br = r;
        }
      }
    }
    if (bl < 0) return std::numeric_limits<double>::infinity();
    used_l[static_cast<std::size_t>(bl)] = true;
    used_r[static_cast<std::size_t>(br)] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

// Minimum-norm least-squares solution via a complete orthogonal decomposition.
inline Matrix min_norm_least_squares(const Matrix& a, const Matrix& b) {
  return Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(b);
}

inline Vector singular_values(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

}  // namespace oracle
