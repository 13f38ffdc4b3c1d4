#include "dts/forward_model.hpp"

#include "dts/errors.hpp"
#include "dts/random.hpp"

namespace dts {

Matrix gaussian_noise(Index rows, Index cols, const NoiseSpec& noise) {
  if (!(noise.sigma >= 0.0)) throw InvariantError("noise sigma must be >= 0");
  Matrix out = Matrix::Zero(rows, cols);
  if (noise.sigma == 0.0) return out;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const auto flat = static_cast<std::uint64_t>(i * cols + j);
      out(i, j) = noise.sigma * counter_normal(noise.seed, flat);
    }
  }
  return out;
}

Matrix degrade(const Matrix& spectra, const SpectralResponse& srf, const NoiseSpec& noise) {
  if (spectra.rows() != srf.in_bands()) {
    throw ShapeError("degrade: input has " + std::to_string(spectra.rows()) +
                     " bands but the spectral response expects " +
                     std::to_string(srf.in_bands()));
  }
  Matrix out = srf.weights() * spectra;
  if (noise.sigma != 0.0) out += gaussian_noise(out.rows(), out.cols(), noise);
  return out;
}

SpectralCube degrade(const SpectralCube& cube, const SpectralResponse& srf,
                     const NoiseSpec& noise) {
  if (static_cast<Index>(cube.bands) != srf.in_bands()) {
    throw ShapeError("degrade: cube has " + std::to_string(cube.bands) +
                     " bands but the spectral response expects " +
                     std::to_string(srf.in_bands()));
  }
  return from_matrix(degrade(as_matrix(cube), srf, noise), cube.rows, cube.cols);
}

SpectralResponse box_response(Index out_bands, Index in_bands) {
  if (out_bands < 1 || out_bands >= in_bands) {
    throw InvariantError("box_response: need 1 <= out_bands < in_bands");
  }
  Matrix w = Matrix::Zero(out_bands, in_bands);
  for (Index i = 0; i < out_bands; ++i) {
    const Index begin = i * in_bands / out_bands;
    const Index end = (i + 1) * in_bands / out_bands;
    w.row(i).segment(begin, end - begin).setConstant(1.0 / static_cast<double>(end - begin));
  }
  return SpectralResponse(std::move(w), true);
}

}  // namespace dts
