#pragma once

#include <filesystem>
#include <string>

#include "dts/types.hpp"

namespace dts::io {

enum class SampleType { f32, f64 };

/// Sidecar header of a raw band-sequential cube. Serialized as a flat JSON
/// object with keys bands, rows, cols, dtype, interleave ("bsq"),
/// byte_order ("little-endian") and optionally description.
struct CubeHeader {
  std::size_t bands = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  SampleType dtype = SampleType::f64;
  std::string description;

  std::size_t sample_bytes() const { return dtype == SampleType::f32 ? 4 : 8; }
  std::size_t raw_bytes() const { return bands * rows * cols * sample_bytes(); }
};

std::filesystem::path header_path(const std::filesystem::path& base);  // <base>.json
std::filesystem::path raw_path(const std::filesystem::path& base);     // <base>.raw

/// Writes <base>.json and <base>.raw. Throws InvariantError for an invalid
/// cube and IoError naming the path when a file cannot be written.
void write_cube(const SpectralCube& cube, const std::filesystem::path& base,
                SampleType dtype = SampleType::f64, const std::string& description = "");

/// Parses and validates a header file. Unknown keys, missing keys, wrong
/// JSON types and out-of-range values raise IoError naming file and field.
CubeHeader read_cube_header(const std::filesystem::path& header_file);

/// Reads <base>.json + <base>.raw. The raw size is checked against the
/// header before any sample is decoded; the result must pass validate_cube.
SpectralCube read_cube(const std::filesystem::path& base);

/// CSV of out_bands rows by in_bands columns. Lines starting with '#' and
/// blank lines are ignored. Ragged rows and non-numeric cells raise IoError
/// with 1-based line/column; invariant failures (negative weights, ...)
/// are rethrown as IoError naming the file.
SpectralResponse read_srf(const std::filesystem::path& path, bool row_normalized = false);
void write_srf(const SpectralResponse& srf, const std::filesystem::path& path);

/// One line per row, comma separated, 17 significant digits. A matrix with
/// no rows produces an empty file.
void export_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_dictionary(const SpectralDictionary& dict, const std::filesystem::path& path);
SpectralDictionary read_dictionary(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double (17 digits).
std::string format_double(double v);

}  // namespace dts::io
