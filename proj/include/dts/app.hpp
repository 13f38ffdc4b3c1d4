#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "dts/admm.hpp"
#include "dts/ksvd.hpp"
#include "dts/metrics.hpp"
#include "dts/transfer.hpp"
#include "dts/types.hpp"

// Command implementations behind the dts executable. Every command writes
// its outputs plus a manifest.json into its output directory; a manifest
// fed to rerun_manifest() repeats the command with identical results.
namespace dts::app {

inline constexpr const char* kVersion = "0.1.0";

struct SynthOptions {
  std::int64_t bands = 31;
  std::int64_t rows = 32;
  std::int64_t cols = 32;
  std::int64_t endmembers = 8;
  std::int64_t sparsity = 3;
  std::uint64_t seed = 1;
  double shift_offset = 0.1;
  double shift_gain = 1.1;
  double shift_sigma = 0.02;
  std::int64_t srf_bands = 4;
  std::string out_dir = "synth";
};

struct DegradeOptions {
  std::string input;
  std::string srf;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 7;
  std::string dtype = "f64";
  std::string out_dir = "degraded";
};

// K-SVD settings shared by learn, transfer and pipeline.
struct LearnParams {
  std::int64_t atoms = 32;
  std::int64_t sparsity = 4;
  std::int64_t iterations = 30;
  std::uint64_t seed = 1;
  bool replace_unused = true;

  KsvdConfig config() const;
};

struct LearnOptions {
  std::string input;
  LearnParams learn;
  std::string out_dir = "learned";
};

struct TransferParams {
  double eta = 0.1;
  double k = 0.0;
  std::string metric = "spectral_angle";
};

struct TransferOptions {
  std::string dictionary;  // D_s CSV
  std::string source;      // Z cube base path
  std::string target;      // Y cube base path
  std::string srf;
  TransferParams transfer;
  LearnParams learn;
  std::string out_dir = "transfer";
};

struct AdmmParams {
  double lambda = 1e-2;
  double gamma = 1e-2;
  double mu = 1e-2;
  std::int64_t max_iters = 500;
  double primal_tol = 1e-4;
  double dual_tol = 1e-4;

  AdmmConfig config(Index warm_start_sparsity) const;
};

struct ReconstructOptions {
  std::string dictionary;   // D_t CSV
  std::string side_spectra; // Z^s CSV, coded against the dictionary to give A_u
  std::string target;       // Y cube base path
  std::string srf;
  AdmmParams admm;
  std::int64_t sparsity = 4;
  std::string truth;        // optional X cube for a quality report
  std::string out_dir = "reconstructed";
};

struct EvaluateOptions {
  std::string reference;
  std::string estimate;
  double ergas_ratio = 1.0;
  std::string out_dir = "evaluation";
};

struct PipelineOptions {
  std::string source;       // Z cube
  std::string target_ms;    // Y cube, or
  std::string target_hs;    // X cube degraded through the SRF
  std::string srf;
  std::string truth;        // ground truth X; defaults to target_hs when given
  bool baseline = false;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 7;
  LearnParams learn;
  TransferParams transfer;
  AdmmParams admm;
  std::string out_dir = "pipeline";
};

struct PipelineConfig {
  KsvdConfig ksvd;
  TransferConfig transfer;
  AdmmConfig admm;
  bool baseline = false;
};

PipelineConfig make_pipeline_config(const LearnParams& learn, const TransferParams& transfer,
                                    const AdmmParams& admm, bool baseline);

/// Everything the pipeline computes, for inspection and export.
struct PipelineResult {
  SpectralDictionary source_dictionary;  // D_s
  SpectralDictionary dictionary;         // D_t, or D_s in baseline mode
  MatchedSet matched;
  CompensationMatrix compensation;       // zero in baseline mode
  CoefficientMatrix side_codes;          // A_u
  AdmmSolution solution;                 // A_x + diagnostics
  SpectralCube estimate;                 // X^
};

/// learn D_s from the source scene -> transfer (or skip in baseline mode)
/// -> code matched spectra (A_u) -> ADMM for A_x -> reconstruct.
/// Stage failures are rethrown as dts::Error prefixed with "[stage]".
PipelineResult run_pipeline(const SpectralCube& source, const SpectralCube& target_ms,
                            const SpectralResponse& srf, const PipelineConfig& cfg);

// Command entry points. Each returns a human-readable summary for stdout.
std::string cmd_synth(const SynthOptions& opts);
std::string cmd_degrade(const DegradeOptions& opts);
std::string cmd_learn(const LearnOptions& opts);
std::string cmd_transfer(const TransferOptions& opts);
std::string cmd_reconstruct(const ReconstructOptions& opts);
std::string cmd_evaluate(const EvaluateOptions& opts);
std::string cmd_pipeline(const PipelineOptions& opts);

/// Flat manifest object: command, version, timestamp plus every option.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& options);

/// Repeats the command recorded in `manifest`. `out_dir` overrides the
/// recorded output directory.
std::string rerun_manifest(const std::filesystem::path& manifest,
                           const std::optional<std::string>& out_dir = std::nullopt);

void to_json(nlohmann::json& j, const SynthOptions& o);
void from_json(const nlohmann::json& j, SynthOptions& o);
void to_json(nlohmann::json& j, const DegradeOptions& o);
void from_json(const nlohmann::json& j, DegradeOptions& o);
void to_json(nlohmann::json& j, const LearnOptions& o);
void from_json(const nlohmann::json& j, LearnOptions& o);
void to_json(nlohmann::json& j, const TransferOptions& o);
void from_json(const nlohmann::json& j, TransferOptions& o);
void to_json(nlohmann::json& j, const ReconstructOptions& o);
void from_json(const nlohmann::json& j, ReconstructOptions& o);
void to_json(nlohmann::json& j, const EvaluateOptions& o);
void from_json(const nlohmann::json& j, EvaluateOptions& o);
void to_json(nlohmann::json& j, const PipelineOptions& o);
void from_json(const nlohmann::json& j, PipelineOptions& o);

}  // namespace dts::app
