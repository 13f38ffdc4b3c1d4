#pragma once

#include <vector>

#include "dts/ksvd.hpp"
#include "dts/types.hpp"

namespace dts {

enum class MatchMetric { euclidean, spectral_angle };

const char* to_string(MatchMetric metric);
MatchMetric parse_match_metric(const std::string& name);

struct TransferConfig {
  double eta = 0.1;       // weight of the similarity term ||Q - k Z^s||_F^2
  double k_scale = 0.0;   // k in the similarity term
  MatchMetric match_metric = MatchMetric::spectral_angle;
  KsvdConfig ksvd;
};

/// Per-atom correspondences between the source scene and the observed
/// multispectral image. Column i of every matrix belongs to atom i.
struct MatchedSet {
  Matrix z_matched;                  // bands_x x K, source spectra Z^s
  Matrix zy_matched;                 // bands_y x K, srf * z_matched
  Matrix y_matched;                  // bands_y x K, matched target pixels Y^s
  std::vector<Index> source_pixel_index;
  std::vector<Index> target_pixel_index;

  Index atoms() const { return z_matched.cols(); }
};

struct SourceMatch {
  Matrix spectra;                    // bands x K
  std::vector<Index> pixel_index;
};

struct TargetMatch {
  Matrix spectra;                    // bands_y x K
  std::vector<Index> pixel_index;
};

/// For each atom, the source pixel whose spectrum is closest to it.
///
/// Euclidean compares the unit-normalized pixel spectrum against the atom,
/// spectral_angle compares angles; both skip zero pixels. The returned
/// spectra are the original, unnormalized pixels. Ties go to the lowest
/// pixel index.
SourceMatch match_atoms_to_source(const SpectralDictionary& dict, const Matrix& source,
                                  MatchMetric metric);
SourceMatch match_atoms_to_source(const SpectralDictionary& dict, const SpectralCube& source,
                                  MatchMetric metric);

/// For each column of `degraded_matches`, the nearest pixel of the observed
/// multispectral image (raw Euclidean distance, or spectral angle).
TargetMatch match_target_pixels(const Matrix& degraded_matches, const Matrix& target,
                                MatchMetric metric);
TargetMatch match_target_pixels(const Matrix& degraded_matches, const SpectralCube& target,
                                MatchMetric metric);

/// ||Y^s - Z_y^s - L Q||_F^2 + eta ||Q - k Z^s||_F^2
double compensation_objective(const MatchedSet& matched, const SpectralResponse& srf,
                              const Matrix& q, double eta, double k_scale);

/// Gradient of compensation_objective with respect to Q.
Matrix compensation_gradient(const MatchedSet& matched, const SpectralResponse& srf,
                             const Matrix& q, double eta, double k_scale);

/// Closed-form minimizer
///   Q = (L^T L + eta I)^{-1} [L^T (Y^s - Z_y^s) + eta k Z^s]
/// via a Cholesky solve. Requires eta > 0.
CompensationMatrix compute_compensation(const MatchedSet& matched, const SpectralResponse& srf,
                                        double eta, double k_scale);

/// K-SVD on the compensated spectra Z^s + Q. The internal codes are dropped.
SpectralDictionary learn_transferred_dictionary(const MatchedSet& matched,
                                                const CompensationMatrix& q,
                                                const KsvdConfig& cfg);

/// Builds the MatchedSet from a source dictionary, the source scene and the
/// observed target. Exposed so the no-transfer baseline can reuse it.
MatchedSet build_matched_set(const SpectralDictionary& source_dict, const Matrix& source,
                             const Matrix& target, const SpectralResponse& srf,
                             MatchMetric metric);

struct TransferResult {
  SpectralDictionary dictionary;     // D_t
  MatchedSet matched;
  CompensationMatrix compensation;
};

/// Full transfer: match atoms to source pixels, degrade them, match target
/// pixels, solve for the compensation and learn the transferred dictionary.
TransferResult transfer(const SpectralDictionary& source_dict, const SpectralCube& source,
                        const SpectralCube& target, const SpectralResponse& srf,
                        const TransferConfig& cfg);

}  // namespace dts
