#include "dts/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dts/errors.hpp"

namespace dts::io {
namespace fs = std::filesystem;
namespace {

using json = nlohmann::json;

template <class T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::ofstream open_for_write(const fs::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open file for writing");
  return out;
}

std::size_t positive_dimension(const json& j, const char* key, const fs::path& file) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    throw IoError(file.string() + ": field '" + key + "' must be an integer");
  }
  const auto n = v.get<std::int64_t>();
  if (n <= 0) throw IoError(file.string() + ": field '" + key + "' must be positive");
  return static_cast<std::size_t>(n);
}

std::string string_field(const json& j, const char* key, const fs::path& file) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw IoError(file.string() + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Numeric CSV grid. Every data row must have the width of the first one.
std::vector<std::vector<double>> read_grid(const fs::path& path, bool allow_comments) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (allow_comments && t.front() == '#') continue;
    std::vector<double> row;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      const std::string cell = trim(t.substr(start, comma == std::string::npos ? std::string::npos
                                                                              : comma - start));
      ++col;
      double value = 0.0;
      if (!parse_double(cell, value)) {
        throw IoError(path.string() + ": row " + std::to_string(line_no) + ", column " +
                      std::to_string(col) + ": '" + cell + "' is not a number");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path.string() + ": ragged row " + std::to_string(line_no) + " has " +
                    std::to_string(row.size()) + " cells, expected " +
                    std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix grid_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace

fs::path header_path(const fs::path& base) { return fs::path(base.string() + ".json"); }
fs::path raw_path(const fs::path& base) { return fs::path(base.string() + ".raw"); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_cube(const SpectralCube& cube, const fs::path& base, SampleType dtype,
                const std::string& description) {
  require_valid(cube, "write_cube");
  json header = {
      {"bands", cube.bands},
      {"rows", cube.rows},
      {"cols", cube.cols},
      {"dtype", dtype == SampleType::f32 ? "f32" : "f64"},
      {"interleave", "bsq"},
      {"byte_order", "little-endian"},
  };
  if (!description.empty()) header["description"] = description;

  {
    auto out = open_for_write(header_path(base), false);
    out << header.dump(2) << '\n';
    if (!out) throw IoError(header_path(base).string() + ": write failed");
  }
  auto out = open_for_write(raw_path(base), true);
  if (dtype == SampleType::f64) {
    std::vector<double> buf(cube.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_little_endian(cube.data[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  } else {
    std::vector<float> buf(cube.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
      buf[i] = to_little_endian(static_cast<float>(cube.data[i]));
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw IoError(raw_path(base).string() + ": write failed");
}

CubeHeader read_cube_header(const fs::path& file) {
  json j;
  try {
    j = json::parse(read_text(file));
  } catch (const json::parse_error& e) {
    throw IoError(file.string() + ": malformed JSON header (" + e.what() + ")");
  }
  if (!j.is_object()) throw IoError(file.string() + ": header must be a JSON object");

  static const char* const known[] = {"bands", "rows", "cols", "dtype",
                                      "interleave", "byte_order", "description"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw IoError(file.string() + ": unknown header field '" + item.key() + "'");
  }
  for (const char* k : {"bands", "rows", "cols", "dtype", "interleave", "byte_order"}) {
    if (!j.contains(k)) throw IoError(file.string() + ": missing header field '" + k + "'");
  }

  CubeHeader h;
  h.bands = positive_dimension(j, "bands", file);
  h.rows = positive_dimension(j, "rows", file);
  h.cols = positive_dimension(j, "cols", file);
  const std::string dtype = string_field(j, "dtype", file);
  if (dtype == "f64") {
    h.dtype = SampleType::f64;
  } else if (dtype == "f32") {
    h.dtype = SampleType::f32;
  } else {
    throw IoError(file.string() + ": field 'dtype' has unsupported value '" + dtype + "'");
  }
  if (string_field(j, "interleave", file) != "bsq") {
    throw IoError(file.string() + ": field 'interleave' must be \"bsq\"");
  }
  if (string_field(j, "byte_order", file) != "little-endian") {
    throw IoError(file.string() + ": field 'byte_order' must be \"little-endian\"");
  }
  if (j.contains("description")) h.description = string_field(j, "description", file);
  return h;
}

SpectralCube read_cube(const fs::path& base) {
  const fs::path hfile = header_path(base);
  const fs::path rfile = raw_path(base);
  if (!fs::exists(hfile)) throw IoError(hfile.string() + ": header file not found");
  if (!fs::exists(rfile)) throw IoError(rfile.string() + ": raw file not found");
  const CubeHeader h = read_cube_header(hfile);

  const auto actual = fs::file_size(rfile);
  if (actual != h.raw_bytes()) {
    throw IoError(rfile.string() + ": length mismatch, expected " + std::to_string(h.raw_bytes()) +
                  " bytes but found " + std::to_string(actual));
  }
  std::ifstream in(rfile, std::ios::binary);
  if (!in) throw IoError(rfile.string() + ": cannot open file");

  SpectralCube cube(h.bands, h.rows, h.cols);
  const std::size_t n = cube.data.size();
  if (h.dtype == SampleType::f64) {
    in.read(reinterpret_cast<char*>(cube.data.data()), static_cast<std::streamsize>(n * 8));
    for (auto& v : cube.data) v = to_little_endian(v);
  } else {
    std::vector<float> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
    for (std::size_t i = 0; i < n; ++i) cube.data[i] = to_little_endian(buf[i]);
  }
  if (!in) throw IoError(rfile.string() + ": read failed");

  const auto report = validate_cube(cube);
  if (!report.ok()) throw IoError(rfile.string() + ": " + report.summary());
  return cube;
}

SpectralResponse read_srf(const fs::path& path, bool row_normalized) {
  const auto rows = read_grid(path, true);
  if (rows.empty()) throw IoError(path.string() + ": no spectral response rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] < 0.0) {
        throw IoError(path.string() + ": negative weight at row " + std::to_string(i + 1) +
                      ", column " + std::to_string(j + 1));
      }
    }
  }
  try {
    return SpectralResponse(grid_to_matrix(rows), row_normalized);
  } catch (const InvariantError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_srf(const SpectralResponse& srf, const fs::path& path) {
  export_matrix_csv(srf.weights(), path);
}

void export_matrix_csv(const Matrix& m, const fs::path& path) {
  if (!m.allFinite()) throw InvariantError("export_matrix_csv: matrix has non-finite entries");
  auto out = open_for_write(path, false);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

Matrix read_matrix_csv(const fs::path& path) { return grid_to_matrix(read_grid(path, false)); }

void write_dictionary(const SpectralDictionary& dict, const fs::path& path) {
  export_matrix_csv(dict.columns(), path);
}

SpectralDictionary read_dictionary(const fs::path& path) {
  try {
    return SpectralDictionary(read_matrix_csv(path));
  } catch (const InvariantError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace dts::io
