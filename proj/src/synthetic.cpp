#include "dts/synthetic.hpp"

#include <cmath>
#include <numeric>

#include "dts/errors.hpp"
#include "dts/random.hpp"

namespace dts {
namespace {

constexpr std::uint64_t kTargetEndmemberStream = 0x7A;
constexpr std::uint64_t kTargetAbundanceStream = 0x7B;

void check_shift(const DomainShift& shift, Index bands) {
  if (shift.additive_offset.size() != bands || shift.multiplicative_gain.size() != bands) {
    throw ShapeError("domain shift vectors must have " + std::to_string(bands) + " entries");
  }
  if ((shift.multiplicative_gain.array() <= 0.0).any()) {
    throw InvariantError("domain shift gains must be > 0");
  }
  if (shift.endmember_perturbation_sigma < 0.0) {
    throw InvariantError("endmember perturbation sigma must be >= 0");
  }
}

}  // namespace

DomainShift DomainShift::none(Index bands) { return uniform(bands, 0.0, 1.0, 0.0); }

DomainShift DomainShift::uniform(Index bands, double offset, double gain, double sigma) {
  return DomainShift{Vector::Constant(bands, offset), Vector::Constant(bands, gain), sigma};
}

Matrix generate_endmembers(Index bands, Index endmembers, std::uint64_t seed) {
  if (bands < 1 || endmembers < 1) {
    throw InvariantError("generate_endmembers: bands and endmember count must be >= 1");
  }
  Rng rng(seed);
  const double span = static_cast<double>(bands - 1);
  const double min_width = std::max(3.0, 0.08 * static_cast<double>(bands));
  const double max_width = std::max(min_width, 0.25 * static_cast<double>(bands));

  Matrix out(bands, endmembers);
  for (Index p = 0; p < endmembers; ++p) {
    const int bumps = 2 + static_cast<int>(rng.below(3));
    Vector s = Vector::Zero(bands);
    for (int i = 0; i < bumps; ++i) {
      const double center = rng.uniform(0.0, span);
      const double width = rng.uniform(min_width, max_width);
      const double height = rng.uniform(0.3, 1.0);
      for (Index b = 0; b < bands; ++b) {
        const double t = (static_cast<double>(b) - center) / width;
        s(b) += height * std::exp(-0.5 * t * t);
      }
    }
    out.col(p) = s / s.maxCoeff();
  }
  return out;
}

SpectralCube generate_scene(const Matrix& endmembers, const SceneSpec& spec) {
  if (endmembers.rows() != spec.bands) {
    throw ShapeError("generate_scene: endmembers have " + std::to_string(endmembers.rows()) +
                     " bands, spec wants " + std::to_string(spec.bands));
  }
  const Index count = endmembers.cols();
  if (spec.abundance_sparsity < 1 || spec.abundance_sparsity > count) {
    throw InvariantError("generate_scene: need 1 <= abundance_sparsity <= endmember count");
  }
  if (spec.rows == 0 || spec.cols == 0) throw InvariantError("generate_scene: empty scene");

  const std::size_t pixels = spec.rows * spec.cols;
  Matrix spectra(spec.bands, static_cast<Index>(pixels));
  std::vector<Index> pool(static_cast<std::size_t>(count));
  for (std::size_t p = 0; p < pixels; ++p) {
    Rng rng(mix_seed(spec.seed, p));
    std::iota(pool.begin(), pool.end(), Index{0});
    // Partial Fisher-Yates: the first abundance_sparsity entries are the picks.
    for (Index i = 0; i < spec.abundance_sparsity; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(count - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    Vector weights(spec.abundance_sparsity);
    for (Index i = 0; i < weights.size(); ++i) weights(i) = -std::log(1.0 - rng.uniform());
    weights /= weights.sum();

    auto pixel = spectra.col(static_cast<Index>(p));
    pixel.setZero();
    for (Index i = 0; i < weights.size(); ++i) {
      pixel += weights(i) * endmembers.col(pool[static_cast<std::size_t>(i)]);
    }
  }
  return from_matrix(spectra, spec.rows, spec.cols);
}

Matrix perturb_endmembers(const Matrix& endmembers, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvariantError("perturb_endmembers: sigma must be >= 0");
  Matrix out = endmembers;
  if (sigma == 0.0) return out;
  for (Index j = 0; j < out.cols(); ++j) {
    for (Index i = 0; i < out.rows(); ++i) {
      const auto flat = static_cast<std::uint64_t>(j * out.rows() + i);
      out(i, j) = std::max(0.0, out(i, j) + sigma * counter_normal(seed, flat));
    }
  }
  return out;
}

SpectralCube apply_domain_shift(const SpectralCube& scene, const DomainShift& shift) {
  check_shift(shift, static_cast<Index>(scene.bands));
  Matrix m = as_matrix(scene);
  m = (shift.multiplicative_gain.asDiagonal() * m).colwise() + shift.additive_offset;
  return from_matrix(m, scene.rows, scene.cols);
}

ScenePair make_scene_pair(const SceneSpec& spec) {
  check_shift(spec.shift, spec.bands);
  ScenePair pair;
  pair.endmembers = generate_endmembers(spec.bands, spec.endmember_count, spec.seed);
  pair.target_endmembers = perturb_endmembers(pair.endmembers,
                                              spec.shift.endmember_perturbation_sigma,
                                              mix_seed(spec.seed, kTargetEndmemberStream));
  pair.source = generate_scene(pair.endmembers, spec);

  SceneSpec target_spec = spec;
  target_spec.seed = mix_seed(spec.seed, kTargetAbundanceStream);
  pair.target = apply_domain_shift(generate_scene(pair.target_endmembers, target_spec), spec.shift);
  return pair;
}

}  // namespace dts
