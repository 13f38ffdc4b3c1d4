#pragma once

#include <optional>
#include <string>

#include "dts/types.hpp"

namespace dts {

inline constexpr double kPsnrCap = 300.0;

struct QualityReport {
  double mse = 0.0;
  double psnr = 0.0;                // dB, peak = max |reference|
  std::optional<double> sam;        // mean spectral angle in degrees
  std::optional<double> ergas;
  std::size_t sam_skipped_pixels = 0;
  std::string error;                // why sam/ergas are missing, if they are

  bool complete() const { return sam.has_value() && ergas.has_value(); }
};

/// MSE, PSNR, SAM and ERGAS of `estimate` against `reference`.
///
///  - psnr = 10 log10(peak^2 / mse), capped at 300 dB once mse < peak^2 * 1e-30
///  - sam averages arccos(<x, x^> / (|x| |x^|)) over pixels where either
///    spectrum is zero is skipped (count reported)
///  - ergas = 100 * ratio * sqrt(mean_b rmse_b^2 / mean_b^2)
///
/// An all-zero reference (or a band with zero mean, for ERGAS) leaves
/// sam/ergas empty with `error` set; mse and psnr are always filled.
/// Throws ShapeError when shapes differ.
QualityReport evaluate_quality(const SpectralCube& reference, const SpectralCube& estimate,
                               double ergas_ratio = 1.0);

/// "MSE,PSNR,SAM,ERGAS"
std::string quality_csv_header();
/// One CSV row in header order, 17 significant digits. Missing values print
/// as "nan".
std::string quality_csv_row(const QualityReport& report);
/// Aligned text table with the same column order.
std::string quality_table(const QualityReport& report, const std::string& label = "");

}  // namespace dts
