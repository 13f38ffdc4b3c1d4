#include "dts/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dts/errors.hpp"
#include "dts/forward_model.hpp"

namespace dts {
namespace {

double angle_between(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                     double norm_a, double norm_b) {
  const double c = std::clamp(a.dot(b) / (norm_a * norm_b), -1.0, 1.0);
  return std::acos(c);
}

void check_source_shapes(const Matrix& zy, const Matrix& z, const SpectralResponse& srf) {
  if (z.rows() != srf.in_bands() || zy.rows() != srf.out_bands() || zy.cols() != z.cols()) {
    throw ShapeError("matched set shapes " + shape_string(z) + " / " + shape_string(zy) +
                     " disagree with spectral response " + std::to_string(srf.out_bands()) +
                     "x" + std::to_string(srf.in_bands()));
  }
}

void check_matched(const MatchedSet& matched, const SpectralResponse& srf) {
  check_source_shapes(matched.zy_matched, matched.z_matched, srf);
  if (matched.y_matched.rows() != matched.zy_matched.rows() ||
      matched.y_matched.cols() != matched.zy_matched.cols()) {
    throw ShapeError("matched target spectra " + shape_string(matched.y_matched) +
                     " disagree with degraded source spectra " +
                     shape_string(matched.zy_matched));
  }
}

}  // namespace

const char* to_string(MatchMetric metric) {
  return metric == MatchMetric::euclidean ? "euclidean" : "spectral_angle";
}

MatchMetric parse_match_metric(const std::string& name) {
  if (name == "euclidean") return MatchMetric::euclidean;
  if (name == "spectral_angle" || name == "sam") return MatchMetric::spectral_angle;
  throw InvariantError("unknown match metric '" + name + "'");
}

SourceMatch match_atoms_to_source(const SpectralDictionary& dict, const Matrix& source,
                                  MatchMetric metric) {
  if (source.cols() == 0) throw ShapeError("match_atoms_to_source: empty source scene");
  if (source.rows() != dict.bands()) {
    throw ShapeError("match_atoms_to_source: scene has " + std::to_string(source.rows()) +
                     " bands, dictionary has " + std::to_string(dict.bands()));
  }
  const Vector norms = source.colwise().norm().transpose();
  SourceMatch out{Matrix(source.rows(), dict.atoms()), {}};
  out.pixel_index.reserve(static_cast<std::size_t>(dict.atoms()));

  for (Index k = 0; k < dict.atoms(); ++k) {
    const auto atom = dict.atom(k);
    Index best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (Index p = 0; p < source.cols(); ++p) {
      if (norms(p) == 0.0) continue;
      double score;
      if (metric == MatchMetric::euclidean) {
        score = (source.col(p) / norms(p) - atom).squaredNorm();
      } else {
        score = angle_between(source.col(p), atom, norms(p), 1.0);
      }
      if (score < best_score) {
        best_score = score;
        best = p;
      }
    }
    if (best < 0) throw InvariantError("match_atoms_to_source: every source pixel is zero");
    out.spectra.col(k) = source.col(best);
    out.pixel_index.push_back(best);
  }
  return out;
}

SourceMatch match_atoms_to_source(const SpectralDictionary& dict, const SpectralCube& source,
                                  MatchMetric metric) {
  return match_atoms_to_source(dict, as_matrix(source), metric);
}

TargetMatch match_target_pixels(const Matrix& degraded_matches, const Matrix& target,
                                MatchMetric metric) {
  if (target.cols() == 0) throw ShapeError("match_target_pixels: empty target image");
  if (target.rows() != degraded_matches.rows()) {
    throw ShapeError("match_target_pixels: target has " + std::to_string(target.rows()) +
                     " bands, degraded spectra have " + std::to_string(degraded_matches.rows()));
  }
  const Vector norms = target.colwise().norm().transpose();
  TargetMatch out{Matrix(target.rows(), degraded_matches.cols()), {}};

  for (Index i = 0; i < degraded_matches.cols(); ++i) {
    const auto query = degraded_matches.col(i);
    const double query_norm = query.norm();
    Index best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (Index p = 0; p < target.cols(); ++p) {
      double score;
      if (metric == MatchMetric::euclidean) {
        score = (target.col(p) - query).squaredNorm();
      } else {
        if (norms(p) == 0.0 || query_norm == 0.0) continue;
        score = angle_between(target.col(p), query, norms(p), query_norm);
      }
      if (score < best_score) {
        best_score = score;
        best = p;
      }
    }
    if (best < 0) best = 0;  // angle undefined everywhere: fall back to the first pixel
    out.spectra.col(i) = target.col(best);
    out.pixel_index.push_back(best);
  }
  return out;
}

TargetMatch match_target_pixels(const Matrix& degraded_matches, const SpectralCube& target,
                                MatchMetric metric) {
  return match_target_pixels(degraded_matches, as_matrix(target), metric);
}

double compensation_objective(const MatchedSet& matched, const SpectralResponse& srf,
                              const Matrix& q, double eta, double k_scale) {
  check_matched(matched, srf);
  const Matrix& l = srf.weights();
  return (matched.y_matched - matched.zy_matched - l * q).squaredNorm() +
         eta * (q - k_scale * matched.z_matched).squaredNorm();
}

Matrix compensation_gradient(const MatchedSet& matched, const SpectralResponse& srf,
                             const Matrix& q, double eta, double k_scale) {
  check_matched(matched, srf);
  const Matrix& l = srf.weights();
  return 2.0 * l.transpose() * (l * q - (matched.y_matched - matched.zy_matched)) +
         2.0 * eta * (q - k_scale * matched.z_matched);
}

CompensationMatrix compute_compensation(const MatchedSet& matched, const SpectralResponse& srf,
                                        double eta, double k_scale) {
  if (!(eta > 0.0)) throw InvariantError("compute_compensation: eta must be > 0");
  check_matched(matched, srf);
  const Matrix& l = srf.weights();
  Matrix normal = l.transpose() * l;
  normal.diagonal().array() += eta;
  const Matrix rhs = l.transpose() * (matched.y_matched - matched.zy_matched) +
                     (eta * k_scale) * matched.z_matched;
  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("compute_compensation: L^T L + eta I is not positive definite");
  }
  return CompensationMatrix{llt.solve(rhs)};
}

SpectralDictionary learn_transferred_dictionary(const MatchedSet& matched,
                                                const CompensationMatrix& q,
                                                const KsvdConfig& cfg) {
  if (q.values.rows() != matched.z_matched.rows() || q.values.cols() != matched.z_matched.cols()) {
    throw ShapeError("learn_transferred_dictionary: compensation " + shape_string(q.values) +
                     " does not match matched spectra " + shape_string(matched.z_matched));
  }
  return ksvd(matched.z_matched + q.values, cfg).dictionary;
}

MatchedSet build_matched_set(const SpectralDictionary& source_dict, const Matrix& source,
                             const Matrix& target, const SpectralResponse& srf,
                             MatchMetric metric) {
  if (target.rows() != srf.out_bands()) {
    throw ShapeError("transfer: target has " + std::to_string(target.rows()) +
                     " bands, spectral response produces " + std::to_string(srf.out_bands()));
  }
  auto src = match_atoms_to_source(source_dict, source, metric);
  MatchedSet matched;
  matched.zy_matched = degrade(src.spectra, srf);
  auto tgt = match_target_pixels(matched.zy_matched, target, metric);
  matched.z_matched = std::move(src.spectra);
  matched.y_matched = std::move(tgt.spectra);
  matched.source_pixel_index = std::move(src.pixel_index);
  matched.target_pixel_index = std::move(tgt.pixel_index);
  return matched;
}

TransferResult transfer(const SpectralDictionary& source_dict, const SpectralCube& source,
                        const SpectralCube& target, const SpectralResponse& srf,
                        const TransferConfig& cfg) {
  MatchedSet matched = build_matched_set(source_dict, as_matrix(source), as_matrix(target), srf,
                                         cfg.match_metric);
  CompensationMatrix q = compute_compensation(matched, srf, cfg.eta, cfg.k_scale);
  SpectralDictionary dt = learn_transferred_dictionary(matched, q, cfg.ksvd);
  return TransferResult{std::move(dt), std::move(matched), std::move(q)};
}

}  // namespace dts
