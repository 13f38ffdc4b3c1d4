#pragma once

#include <cstdint>

#include "dts/types.hpp"

namespace dts {

/// Structured difference between the source scene and the target scene.
struct DomainShift {
  Vector additive_offset;          // bands
  Vector multiplicative_gain;      // bands, all > 0
  double endmember_perturbation_sigma = 0.0;

  static DomainShift none(Index bands);
  static DomainShift uniform(Index bands, double offset, double gain, double sigma);
};

struct SceneSpec {
  Index bands = 31;
  std::size_t rows = 32;
  std::size_t cols = 32;
  Index endmember_count = 8;
  Index abundance_sparsity = 3;
  std::uint64_t seed = 1;
  DomainShift shift = DomainShift::none(31);
};

/// bands x P nonnegative spectra, each a seeded sum of 2-4 Gaussian bumps
/// over the band index scaled to a maximum of 1. Bump widths are at least
/// three bands, which bounds the second difference below 4/9.
Matrix generate_endmembers(Index bands, Index endmembers, std::uint64_t seed);

/// Linear mixing: every pixel combines abundance_sparsity distinct
/// endmembers with Dirichlet(1) abundances summing to one. Pixel p draws
/// from a generator keyed by (spec.seed, p).
SpectralCube generate_scene(const Matrix& endmembers, const SceneSpec& spec);

/// endmembers + N(0, sigma^2) per entry, clipped at zero.
Matrix perturb_endmembers(const Matrix& endmembers, double sigma, std::uint64_t seed);

/// Per pixel: gain .* z + offset. The endmember perturbation is applied when
/// the target scene is generated (see make_scene_pair), not here.
SpectralCube apply_domain_shift(const SpectralCube& scene, const DomainShift& shift);

struct ScenePair {
  Matrix endmembers;           // source materials
  Matrix target_endmembers;    // perturbed materials behind the target
  SpectralCube source;         // Z
  SpectralCube target;         // X
};

/// Source scene from the endmembers; target scene from perturbed endmembers
/// with an independent abundance draw, then gain/offset applied.
ScenePair make_scene_pair(const SceneSpec& spec);

}  // namespace dts
