#pragma once

#include <cstdint>
#include <vector>

#include "dts/sparse_coding.hpp"
#include "dts/types.hpp"

namespace dts {

struct KsvdConfig {
  Index atoms = 32;
  OmpConfig sparsity{4, 0.0};
  int iterations = 30;
  std::uint64_t seed = 1;
  bool replace_unused = true;
};

struct KsvdResult {
  SpectralDictionary dictionary;
  CoefficientMatrix codes;
  // ||training - D A||_F after each iteration's atom sweep, for the codes
  // produced by that sweep. Empty when iterations == 0.
  std::vector<double> residual_trace;
  // Atoms replaced by a training column during the last iteration.
  std::vector<Index> replaced_atoms;
  // Set when an iteration found no atom in use by any column; the
  // initialization is then returned as is.
  bool degenerate = false;
  // Set when atoms > training columns (learning is still attempted).
  bool more_atoms_than_samples = false;
};

/// K distinct training columns, visited in a seeded random order and
/// normalized; columns that are zero or parallel to an accepted atom are
/// skipped. Missing atoms are filled with seeded random unit vectors.
/// Throws InvariantError("no usable training columns") if training is all zero.
SpectralDictionary init_dictionary(const Matrix& training, Index atoms, std::uint64_t seed);

/// K-SVD: alternate OMP coding with sequential rank-1 SVD atom updates.
/// Atoms are sign-normalized so their largest-magnitude entry is positive.
KsvdResult ksvd(const Matrix& training, const KsvdConfig& cfg);

}  // namespace dts
