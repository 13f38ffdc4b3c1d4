#include "dts/ksvd.hpp"

#include <cmath>
#include <numeric>

#include "dts/errors.hpp"
#include "dts/random.hpp"

namespace dts {
namespace {

constexpr double kZeroResidual = 1e-12;

bool parallel_to_any(const Matrix& atoms, Index count, const Vector& v, Index skip = -1) {
  for (Index k = 0; k < count; ++k) {
    if (k == skip) continue;
    if (std::abs(atoms.col(k).dot(v)) >= 1.0 - kDuplicateAtomTolerance) return true;
  }
  return false;
}

// Flip so the largest-magnitude entry is positive (first one on ties).
bool needs_flip(const Eigen::Ref<const Vector>& atom) {
  Index arg = 0;
  atom.cwiseAbs().maxCoeff(&arg);
  return atom(arg) < 0.0;
}

double frobenius_residual(const Matrix& training, const Matrix& atoms, const Matrix& codes) {
  return (training - atoms * codes).norm();
}

}  // namespace

SpectralDictionary init_dictionary(const Matrix& training, Index atoms, std::uint64_t seed) {
  if (atoms < 1) throw InvariantError("init_dictionary: atom count must be >= 1");
  if (training.rows() < 1) throw ShapeError("init_dictionary: training has no bands");

  std::vector<Index> order(static_cast<std::size_t>(training.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }

  Matrix dict(training.rows(), atoms);
  Index filled = 0;
  bool any_nonzero = false;
  for (Index j : order) {
    if (filled == atoms) break;
    const double norm = training.col(j).norm();
    if (norm == 0.0 || !std::isfinite(norm)) continue;
    any_nonzero = true;
    const Vector unit = training.col(j) / norm;
    if (parallel_to_any(dict, filled, unit)) continue;
    dict.col(filled++) = unit;
  }
  if (!any_nonzero) throw InvariantError("init_dictionary: no usable training columns");

  while (filled < atoms) {
    Vector v(training.rows());
    for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    const double norm = v.norm();
    if (norm == 0.0) continue;
    v /= norm;
    if (parallel_to_any(dict, filled, v)) continue;
    dict.col(filled++) = v;
  }
  return SpectralDictionary(std::move(dict));
}

KsvdResult ksvd(const Matrix& training, const KsvdConfig& cfg) {
  if (training.cols() < 1) throw ShapeError("ksvd: training matrix has no columns");
  if (!training.allFinite()) throw InvariantError("ksvd: training matrix is not finite");
  if (cfg.iterations < 0) throw InvariantError("ksvd: iterations must be >= 0");

  const SpectralDictionary initial = init_dictionary(training, cfg.atoms, cfg.seed);
  Matrix atoms = initial.columns();
  CoefficientMatrix codes = batch_code(atoms, training, cfg.sparsity);

  KsvdResult result{initial, codes, {}, {}, false, cfg.atoms > training.cols()};
  const Index n_atoms = atoms.cols();

  for (int it = 0; it < cfg.iterations; ++it) {
    if (it > 0) codes = batch_code(atoms, training, cfg.sparsity);
    Matrix& coeff = codes.values;

    std::vector<bool> column_claimed(static_cast<std::size_t>(training.cols()), false);
    std::vector<Index> replaced;
    bool any_used = false;

    for (Index k = 0; k < n_atoms; ++k) {
      std::vector<Index> users;
      for (Index j = 0; j < coeff.cols(); ++j) {
        if (coeff(k, j) != 0.0) users.push_back(j);
      }

      if (users.empty()) {
        if (!cfg.replace_unused) continue;
        // Unused atom: take the worst-represented training column that
        // would not duplicate an existing atom.
        const Vector errors = (training - atoms * coeff).colwise().squaredNorm().transpose();
        Index worst = -1;
        double worst_err = 0.0;
        for (Index j = 0; j < training.cols(); ++j) {
          if (column_claimed[static_cast<std::size_t>(j)] || errors(j) <= worst_err) continue;
          const double norm = training.col(j).norm();
          if (norm == 0.0) continue;
          if (parallel_to_any(atoms, n_atoms, training.col(j) / norm, k)) continue;
          worst = j;
          worst_err = errors(j);
        }
        if (worst >= 0) {
          column_claimed[static_cast<std::size_t>(worst)] = true;
          atoms.col(k) = training.col(worst).normalized();
          if (needs_flip(atoms.col(k))) atoms.col(k) *= -1.0;
          replaced.push_back(k);
        }
        continue;
      }
      any_used = true;

      const Index m = static_cast<Index>(users.size());
      Matrix restricted(training.rows(), m);
      for (Index i = 0; i < m; ++i) {
        const Index j = users[static_cast<std::size_t>(i)];
        restricted.col(i) = training.col(j) - atoms * coeff.col(j) + atoms.col(k) * coeff(k, j);
      }
      if (restricted.norm() < kZeroResidual) continue;

      Eigen::JacobiSVD<Matrix> svd(restricted, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Vector atom = svd.matrixU().col(0);
      Vector row = svd.singularValues()(0) * svd.matrixV().col(0);
      if (needs_flip(atom)) {
        atom = -atom;
        row = -row;
      }
      // Keep the old atom if the update would collapse onto another one.
      if (parallel_to_any(atoms, n_atoms, atom, k)) continue;
      atoms.col(k) = atom;
      for (Index i = 0; i < m; ++i) coeff(k, users[static_cast<std::size_t>(i)]) = row(i);
    }

    if (!any_used) {
      result.degenerate = true;
      result.dictionary = initial;
      result.codes = batch_code(initial.columns(), training, cfg.sparsity);
      result.residual_trace.clear();
      return result;
    }

    result.replaced_atoms = std::move(replaced);
    result.residual_trace.push_back(frobenius_residual(training, atoms, coeff));
  }

  result.dictionary = SpectralDictionary(atoms);
  result.codes = std::move(codes);
  return result;
}

}  // namespace dts
