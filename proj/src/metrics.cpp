#include "dts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dts/errors.hpp"

namespace dts {
namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

QualityReport evaluate_quality(const SpectralCube& reference, const SpectralCube& estimate,
                               double ergas_ratio) {
  if (!reference.same_shape(estimate)) {
    throw ShapeError("evaluate_quality: reference is " + reference.shape_string() +
                     ", estimate is " + estimate.shape_string());
  }
  if (!(ergas_ratio > 0.0)) throw InvariantError("evaluate_quality: ergas_ratio must be > 0");
  const Matrix ref = as_matrix(reference);
  const Matrix est = as_matrix(estimate);
  const Matrix diff = est - ref;

  QualityReport report;
  report.mse = diff.squaredNorm() / static_cast<double>(diff.size());
  const double peak = ref.cwiseAbs().maxCoeff();
  if (report.mse < peak * peak * 1e-30) {
    report.psnr = kPsnrCap;
  } else {
    report.psnr = 10.0 * std::log10(peak * peak / report.mse);
  }

  if (peak == 0.0) {
    report.error = "reference is all zero; SAM and ERGAS are undefined";
    return report;
  }

  double angle_sum = 0.0;
  std::size_t counted = 0;
  for (Index p = 0; p < ref.cols(); ++p) {
    const double nr = ref.col(p).norm();
    const double ne = est.col(p).norm();
    if (nr == 0.0 || ne == 0.0) {
      ++report.sam_skipped_pixels;
      continue;
    }
    // 2 atan2(|a - b|, |a + b|) on unit vectors; acos loses ~1e-8 rad near 0
    const Vector a = ref.col(p) / nr;
    const Vector b = est.col(p) / ne;
    angle_sum += 2.0 * std::atan2((a - b).norm(), (a + b).norm());
    ++counted;
  }
  if (counted > 0) {
    report.sam = angle_sum / static_cast<double>(counted) * 180.0 / std::numbers::pi;
  } else {
    report.error = "no pixel with nonzero reference and estimate spectra; SAM undefined";
  }

  const double pixels = static_cast<double>(ref.cols());
  double acc = 0.0;
  for (Index b = 0; b < ref.rows(); ++b) {
    const double mean = ref.row(b).sum() / pixels;
    if (mean == 0.0) {
      report.error = "reference band " + std::to_string(b) + " has zero mean; ERGAS undefined";
      return report;
    }
    const double mse_b = diff.row(b).squaredNorm() / pixels;
    acc += mse_b / (mean * mean);
  }
  report.ergas = 100.0 * ergas_ratio * std::sqrt(acc / static_cast<double>(ref.rows()));
  return report;
}

std::string quality_csv_header() { return "MSE,PSNR,SAM,ERGAS"; }

std::string quality_csv_row(const QualityReport& r) {
  const double nan = std::nan("");
  return format_number(r.mse) + "," + format_number(r.psnr) + "," +
         format_number(r.sam.value_or(nan)) + "," + format_number(r.ergas.value_or(nan));
}

std::string quality_table(const QualityReport& r, const std::string& label) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s %12s %12s %12s %12s\n", "Method", "MSE", "PSNR", "SAM",
                "ERGAS");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %12.6g %12.4f %12.4f %12.4f\n",
                label.empty() ? "-" : label.c_str(), r.mse, r.psnr, r.sam.value_or(std::nan("")),
                r.ergas.value_or(std::nan("")));
  out += buf;
  return out;
}

}  // namespace dts
