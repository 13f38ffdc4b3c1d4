#include "dts/sparse_coding.hpp"

#include <algorithm>
#include <cmath>

#include "dts/errors.hpp"

namespace dts {
namespace {

constexpr double kMaxSupportCondition = 1e12;

void check_atoms(const Matrix& atoms) {
  for (Index k = 0; k < atoms.cols(); ++k) {
    if (atoms.col(k).squaredNorm() == 0.0) {
      throw InvariantError("omp: dictionary atom " + std::to_string(k) + " is a zero column");
    }
  }
}

// Least-squares fit of `signal` on the selected columns. Returns false when
// the support submatrix is numerically rank deficient.
bool refit(const Matrix& atoms, const std::vector<Index>& support,
           const Eigen::Ref<const Vector>& signal, Vector& coeffs) {
  Matrix sub(atoms.rows(), static_cast<Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) sub.col(static_cast<Index>(i)) = atoms.col(support[i]);
  Eigen::ColPivHouseholderQR<Matrix> qr(sub);
  const auto diag = qr.matrixR().diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  const double smallest = diag.minCoeff();
  if (static_cast<Index>(support.size()) > atoms.rows() || smallest == 0.0 ||
      largest / smallest > kMaxSupportCondition) {
    return false;
  }
  coeffs = qr.solve(signal);
  return true;
}

}  // namespace

OmpResult omp_detailed(const Matrix& atoms, const Eigen::Ref<const Vector>& signal,
                       const OmpConfig& cfg) {
  if (signal.size() != atoms.rows()) {
    throw ShapeError("omp: signal length " + std::to_string(signal.size()) +
                     " does not match dictionary bands " + std::to_string(atoms.rows()));
  }
  if (cfg.max_atoms < 0 || cfg.residual_tol < 0.0) {
    throw InvariantError("omp: max_atoms and residual_tol must be nonnegative");
  }
  check_atoms(atoms);

  const Index n_atoms = atoms.cols();
  const Index budget = std::min(cfg.max_atoms, n_atoms);
  OmpResult result;
  result.coefficients = Vector::Zero(n_atoms);
  Vector residual = signal;
  result.residual_norms.push_back(residual.norm());
  std::vector<bool> selected(static_cast<std::size_t>(n_atoms), false);
  Vector support_coeffs;

  while (static_cast<Index>(result.support.size()) < budget &&
         result.residual_norms.back() > cfg.residual_tol) {
    const Vector corr = atoms.transpose() * residual;
    Index best = -1;
    double best_abs = 0.0;
    for (Index k = 0; k < n_atoms; ++k) {
      if (selected[static_cast<std::size_t>(k)]) continue;
      const double c = std::abs(corr(k));
      if (c > best_abs) {
        best_abs = c;
        best = k;
      }
    }
    if (best < 0) break;  // residual orthogonal to all remaining atoms

    auto trial = result.support;
    trial.push_back(best);
    Vector trial_coeffs;
    if (!refit(atoms, trial, signal, trial_coeffs)) {
      result.rank_deficient_stop = true;
      break;
    }
    result.support = std::move(trial);
    support_coeffs = std::move(trial_coeffs);
    selected[static_cast<std::size_t>(best)] = true;

    residual = signal;
    for (std::size_t i = 0; i < result.support.size(); ++i) {
      residual -= support_coeffs(static_cast<Index>(i)) * atoms.col(result.support[i]);
    }
    result.residual_norms.push_back(residual.norm());
  }

  for (std::size_t i = 0; i < result.support.size(); ++i) {
    result.coefficients(result.support[i]) = support_coeffs(static_cast<Index>(i));
  }
  return result;
}

Vector omp(const SpectralDictionary& dict, const Eigen::Ref<const Vector>& signal,
           const OmpConfig& cfg) {
  return omp_detailed(dict.columns(), signal, cfg).coefficients;
}

CoefficientMatrix batch_code(const Matrix& atoms, const Matrix& signals, const OmpConfig& cfg) {
  if (signals.rows() != atoms.rows()) {
    throw ShapeError("batch_code: signals have " + std::to_string(signals.rows()) +
                     " bands, dictionary has " + std::to_string(atoms.rows()));
  }
  CoefficientMatrix codes;
  codes.values = Matrix::Zero(atoms.cols(), signals.cols());
  codes.sparsity_budget = cfg.max_atoms;
  codes.supports.resize(static_cast<std::size_t>(signals.cols()));
  for (Index j = 0; j < signals.cols(); ++j) {
    auto res = omp_detailed(atoms, signals.col(j), cfg);
    codes.values.col(j) = res.coefficients;
    codes.supports[static_cast<std::size_t>(j)] = std::move(res.support);
  }
  return codes;
}

CoefficientMatrix batch_code(const SpectralDictionary& dict, const Matrix& signals,
                             const OmpConfig& cfg) {
  return batch_code(dict.columns(), signals, cfg);
}

}  // namespace dts
