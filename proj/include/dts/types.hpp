#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dts {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kUnitNormTolerance = 1e-9;
inline constexpr double kDuplicateAtomTolerance = 1e-9;
inline constexpr double kRowSumTolerance = 1e-9;

/// A (bands x rows x cols) image stored band-sequentially:
/// data[b * rows * cols + r * cols + c]. Pixels are ordered row-major, so
/// pixel index p = r * cols + c.
///
/// The struct does not enforce its invariants on construction; readers and
/// producers call validate_cube() and operations that need a well-formed cube
/// throw ShapeError/InvariantError.
struct SpectralCube {
  std::size_t bands = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  SpectralCube() = default;
  SpectralCube(std::size_t bands, std::size_t rows, std::size_t cols);
  SpectralCube(std::size_t bands, std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t pixels() const { return rows * cols; }
  std::size_t expected_size() const { return bands * rows * cols; }

  double at(std::size_t band, std::size_t row, std::size_t col) const {
    return data[band * pixels() + row * cols + col];
  }

  bool same_shape(const SpectralCube& other) const {
    return bands == other.bands && rows == other.rows && cols == other.cols;
  }

  std::string shape_string() const;
};

struct Violation {
  std::string kind;     // "zero dimension", "length mismatch", "non-finite value"
  std::string message;
  std::optional<std::size_t> index;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& kind) const;
  std::string summary() const;
};

/// Checks every SpectralCube invariant and never throws.
ValidationReport validate_cube(const SpectralCube& cube);

/// Throws InvariantError carrying the report summary when the cube is invalid.
void require_valid(const SpectralCube& cube, const std::string& what = "cube");

/// bands x pixels matrix; column p is the spectrum of pixel p.
Matrix as_matrix(const SpectralCube& cube);

/// Inverse of as_matrix. matrix.cols() must equal rows * cols.
SpectralCube from_matrix(const Matrix& matrix, std::size_t rows, std::size_t cols);

/// The out_bands x in_bands spectral degradation operator.
class SpectralResponse {
 public:
  /// Throws InvariantError unless out_bands < in_bands, every weight is
  /// finite and nonnegative, and every row has a nonzero. When row_normalized
  /// is set each row must also sum to one.
  explicit SpectralResponse(Matrix weights, bool row_normalized = false);

  Index out_bands() const { return weights_.rows(); }
  Index in_bands() const { return weights_.cols(); }
  const Matrix& weights() const { return weights_; }
  bool row_normalized() const { return row_normalized_; }

 private:
  Matrix weights_;
  bool row_normalized_;
};

/// bands x K matrix of distinct unit-norm atoms.
class SpectralDictionary {
 public:
  /// Throws InvariantError if any column is not unit norm (1e-9) or two
  /// columns are parallel (|<a, b>| >= 1 - 1e-9).
  explicit SpectralDictionary(Matrix columns);

  /// Normalizes each column first. Zero columns raise InvariantError.
  static SpectralDictionary from_unnormalized(Matrix columns);

  Index bands() const { return columns_.rows(); }
  Index atoms() const { return columns_.cols(); }
  const Matrix& columns() const { return columns_; }
  auto atom(Index k) const { return columns_.col(k); }

 private:
  Matrix columns_;
};

/// Returns a description of the first dictionary invariant that fails, or
/// nothing when the columns form a valid dictionary.
std::optional<std::string> dictionary_violation(const Matrix& columns);

/// K x n codes. When sparsity_budget is set every column has at most that
/// many nonzeros; supports, when filled, lists the nonzero rows per column in
/// selection order.
struct CoefficientMatrix {
  Matrix values;
  std::optional<Index> sparsity_budget;
  std::vector<std::vector<Index>> supports;

  Index atoms() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

/// Throws InvariantError on non-finite values or a column over budget.
void check_coefficients(const CoefficientMatrix& codes);

/// bands x K additive correction applied to matched source spectra.
struct CompensationMatrix {
  Matrix values;

  Index bands() const { return values.rows(); }
  Index atoms() const { return values.cols(); }
};

std::string shape_string(const Matrix& m);

}  // namespace dts
