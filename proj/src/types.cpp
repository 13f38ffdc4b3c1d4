#include "dts/types.hpp"

#include <cmath>
#include <sstream>

#include "dts/errors.hpp"

namespace dts {

SpectralCube::SpectralCube(std::size_t b, std::size_t r, std::size_t c)
    : bands(b), rows(r), cols(c), data(b * r * c, 0.0) {}

SpectralCube::SpectralCube(std::size_t b, std::size_t r, std::size_t c, std::vector<double> d)
    : bands(b), rows(r), cols(c), data(std::move(d)) {}

std::string SpectralCube::shape_string() const {
  std::ostringstream os;
  os << bands << "x" << rows << "x" << cols;
  return os.str();
}

bool ValidationReport::has(const std::string& kind) const {
  for (const auto& v : violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].message;
  }
  return os.str();
}

ValidationReport validate_cube(const SpectralCube& cube) {
  ValidationReport report;
  if (cube.bands == 0 || cube.rows == 0 || cube.cols == 0) {
    report.violations.push_back(
        {"zero dimension", "zero dimension in shape " + cube.shape_string(), std::nullopt});
  }
  if (cube.data.size() != cube.expected_size()) {
    std::ostringstream os;
    os << "length mismatch: data holds " << cube.data.size() << " samples but shape "
       << cube.shape_string() << " needs " << cube.expected_size();
    report.violations.push_back({"length mismatch", os.str(), std::nullopt});
  }
  for (std::size_t i = 0; i < cube.data.size(); ++i) {
    if (!std::isfinite(cube.data[i])) {
      std::ostringstream os;
      os << "non-finite value at index " << i;
      report.violations.push_back({"non-finite value", os.str(), i});
      break;
    }
  }
  return report;
}

void require_valid(const SpectralCube& cube, const std::string& what) {
  const auto report = validate_cube(cube);
  if (!report.ok()) throw InvariantError(what + ": " + report.summary());
}

Matrix as_matrix(const SpectralCube& cube) {
  if (cube.data.size() != cube.expected_size()) {
    throw ShapeError("as_matrix: data length " + std::to_string(cube.data.size()) +
                     " does not match shape " + cube.shape_string());
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(cube.data.data(), static_cast<Index>(cube.bands),
                                    static_cast<Index>(cube.pixels()));
}

SpectralCube from_matrix(const Matrix& matrix, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(matrix.cols()) != rows * cols) {
    throw ShapeError("from_matrix: " + std::to_string(matrix.cols()) + " pixels cannot fill " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  SpectralCube cube(static_cast<std::size_t>(matrix.rows()), rows, cols);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor>(cube.data.data(), matrix.rows(), matrix.cols()) = matrix;
  return cube;
}

SpectralResponse::SpectralResponse(Matrix weights, bool row_normalized)
    : weights_(std::move(weights)), row_normalized_(row_normalized) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw InvariantError("spectral response: empty weight matrix");
  }
  if (weights_.rows() >= weights_.cols()) {
    throw InvariantError("spectral response: out_bands " + std::to_string(weights_.rows()) +
                         " must be smaller than in_bands " + std::to_string(weights_.cols()));
  }
  for (Index i = 0; i < weights_.rows(); ++i) {
    bool nonzero = false;
    for (Index j = 0; j < weights_.cols(); ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InvariantError("spectral response: weight (" + std::to_string(i) + "," +
                             std::to_string(j) + ") is negative or non-finite");
      }
      nonzero = nonzero || w != 0.0;
    }
    if (!nonzero) {
      throw InvariantError("spectral response: row " + std::to_string(i) + " is all zero");
    }
    if (row_normalized_ && std::abs(weights_.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw InvariantError("spectral response: row " + std::to_string(i) +
                           " does not sum to 1");
    }
  }
}

std::optional<std::string> dictionary_violation(const Matrix& columns) {
  if (columns.rows() == 0 || columns.cols() == 0) return "empty dictionary";
  if (!columns.allFinite()) return "non-finite dictionary entry";
  for (Index k = 0; k < columns.cols(); ++k) {
    const double norm = columns.col(k).norm();
    if (norm == 0.0) return "atom " + std::to_string(k) + " is a zero column";
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      return "atom " + std::to_string(k) + " has norm " + std::to_string(norm);
    }
  }
  for (Index a = 0; a < columns.cols(); ++a) {
    for (Index b = a + 1; b < columns.cols(); ++b) {
      if (std::abs(columns.col(a).dot(columns.col(b))) >= 1.0 - kDuplicateAtomTolerance) {
        return "atoms " + std::to_string(a) + " and " + std::to_string(b) + " are duplicates";
      }
    }
  }
  return std::nullopt;
}

SpectralDictionary::SpectralDictionary(Matrix columns) : columns_(std::move(columns)) {
  if (auto why = dictionary_violation(columns_)) {
    throw InvariantError("spectral dictionary: " + *why);
  }
}

SpectralDictionary SpectralDictionary::from_unnormalized(Matrix columns) {
  for (Index k = 0; k < columns.cols(); ++k) {
    const double norm = columns.col(k).norm();
    if (norm == 0.0) {
      throw InvariantError("spectral dictionary: atom " + std::to_string(k) + " is a zero column");
    }
    columns.col(k) /= norm;
  }
  return SpectralDictionary(std::move(columns));
}

void check_coefficients(const CoefficientMatrix& codes) {
  if (!codes.values.allFinite()) throw InvariantError("coefficients: non-finite value");
  if (!codes.sparsity_budget) return;
  for (Index j = 0; j < codes.values.cols(); ++j) {
    const Index nnz = (codes.values.col(j).array() != 0.0).count();
    if (nnz > *codes.sparsity_budget) {
      throw InvariantError("coefficients: column " + std::to_string(j) + " has " +
                           std::to_string(nnz) + " nonzeros, budget " +
                           std::to_string(*codes.sparsity_budget));
    }
  }
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace dts
