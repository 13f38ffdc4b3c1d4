#pragma once

#include <vector>

#include "dts/types.hpp"

namespace dts {

struct OmpConfig {
  Index max_atoms = 4;
  double residual_tol = 0.0;  // stop once ||residual||_2 <= residual_tol
};

struct OmpResult {
  Vector coefficients;                  // length K
  std::vector<Index> support;           // in selection order
  std::vector<double> residual_norms;   // entry t: residual norm after t atoms
  bool rank_deficient_stop = false;     // refit on the next support was ill-conditioned
};

/// Orthogonal matching pursuit over the columns of `atoms`.
///
/// Each step adds the unselected atom with the largest |<atom, residual>|
/// (lowest index on ties) and refits all selected coefficients by least
/// squares (column-pivoted QR). Stops at max_atoms, at residual_tol, when
/// the residual is orthogonal to every remaining atom, or when the refit
/// would be rank deficient (condition estimate > 1e12), in which case the
/// previous solution is kept.
///
/// Throws ShapeError on a length mismatch and InvariantError on a zero atom.
OmpResult omp_detailed(const Matrix& atoms, const Eigen::Ref<const Vector>& signal,
                       const OmpConfig& cfg);

Vector omp(const SpectralDictionary& dict, const Eigen::Ref<const Vector>& signal,
           const OmpConfig& cfg);

/// Column-wise omp. Columns are independent.
CoefficientMatrix batch_code(const SpectralDictionary& dict, const Matrix& signals,
                             const OmpConfig& cfg);
CoefficientMatrix batch_code(const Matrix& atoms, const Matrix& signals, const OmpConfig& cfg);

}  // namespace dts
