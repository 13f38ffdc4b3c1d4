#pragma once

#include <cstdint>

#include "dts/types.hpp"

namespace dts {

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// rows x cols matrix of i.i.d. N(0, sigma^2) samples. Entry (i, j) is
/// sigma * counter_normal(seed, i * cols + j), i.e. it is keyed by its
/// row-major flat index. sigma == 0 yields an exact zero matrix.
Matrix gaussian_noise(Index rows, Index cols, const NoiseSpec& noise);

/// Spectral degradation: as_matrix(result) = srf.weights * as_matrix(cube) + noise.
/// Spatial shape is preserved. Throws ShapeError when cube.bands != srf.in_bands.
SpectralCube degrade(const SpectralCube& cube, const SpectralResponse& srf,
                     const NoiseSpec& noise = {});

/// Same operation on a bands x pixels matrix.
Matrix degrade(const Matrix& spectra, const SpectralResponse& srf, const NoiseSpec& noise = {});

/// Row-normalized box filter: out_bands contiguous, near-equal groups of
/// input bands, each averaged. Used for synthetic experiments.
SpectralResponse box_response(Index out_bands, Index in_bands);

}  // namespace dts
