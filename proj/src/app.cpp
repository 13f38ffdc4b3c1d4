#include "dts/app.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "dts/errors.hpp"
#include "dts/forward_model.hpp"
#include "dts/io.hpp"
#include "dts/sparse_coding.hpp"
#include "dts/synthetic.hpp"

namespace dts::app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error(std::string("[") + name + "] " + e.what());
  }
}

template <class T>
void get_if(const json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

void put_learn(json& j, const LearnParams& p) {
  j["atoms"] = p.atoms;
  j["sparsity"] = p.sparsity;
  j["iterations"] = p.iterations;
  j["seed"] = p.seed;
  j["replace_unused"] = p.replace_unused;
}

void get_learn(const json& j, LearnParams& p) {
  get_if(j, "atoms", p.atoms);
  get_if(j, "sparsity", p.sparsity);
  get_if(j, "iterations", p.iterations);
  get_if(j, "seed", p.seed);
  get_if(j, "replace_unused", p.replace_unused);
}

void put_transfer(json& j, const TransferParams& p) {
  j["eta"] = p.eta;
  j["k"] = p.k;
  j["metric"] = p.metric;
}

void get_transfer(const json& j, TransferParams& p) {
  get_if(j, "eta", p.eta);
  get_if(j, "k", p.k);
  get_if(j, "metric", p.metric);
}

void put_admm(json& j, const AdmmParams& p) {
  j["lambda"] = p.lambda;
  j["gamma"] = p.gamma;
  j["mu"] = p.mu;
  j["max_iters"] = p.max_iters;
  j["primal_tol"] = p.primal_tol;
  j["dual_tol"] = p.dual_tol;
}

void get_admm(const json& j, AdmmParams& p) {
  get_if(j, "lambda", p.lambda);
  get_if(j, "gamma", p.gamma);
  get_if(j, "mu", p.mu);
  get_if(j, "max_iters", p.max_iters);
  get_if(j, "primal_tol", p.primal_tol);
  get_if(j, "dual_tol", p.dual_tol);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError(out.string() + ": cannot create output directory (" + ec.message() + ")");
  return out;
}

void write_manifest(const fs::path& out, const std::string& command, const json& options) {
  const fs::path file = out / "manifest.json";
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw IoError(file.string() + ": cannot open file for writing");
  os << make_manifest(command, options).dump(2) << '\n';
}

io::SampleType parse_dtype(const std::string& s) {
  if (s == "f64") return io::SampleType::f64;
  if (s == "f32") return io::SampleType::f32;
  throw InvariantError("unknown dtype '" + s + "' (expected f32 or f64)");
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw IoError(file.string() + ": cannot open file for writing");
  os << text;
}

void write_quality(const fs::path& file, const QualityReport& q) {
  write_text(file, quality_csv_header() + "\n" + quality_csv_row(q) + "\n");
}

void write_admm_csv(const fs::path& file, const AdmmDiagnostics& d) {
  std::ostringstream os;
  os << "iteration,objective,residual_g,residual_h,dual_change\n";
  os << 0 << ',' << io::format_double(d.objective.front()) << ",,,\n";
  for (std::size_t i = 0; i < d.residual_g.size(); ++i) {
    os << i + 1 << ',' << io::format_double(d.objective[i + 1]) << ','
       << io::format_double(d.residual_g[i]) << ',' << io::format_double(d.residual_h[i]) << ','
       << io::format_double(d.dual_change[i]) << '\n';
  }
  write_text(file, os.str());
}

void write_matches(const fs::path& file, const MatchedSet& m) {
  std::ostringstream os;
  os << "atom,source_pixel,target_pixel\n";
  for (std::size_t i = 0; i < m.source_pixel_index.size(); ++i) {
    os << i << ',' << m.source_pixel_index[i] << ',' << m.target_pixel_index[i] << '\n';
  }
  write_text(file, os.str());
}

std::string describe(const QualityReport& q, const std::string& label) {
  std::string out = quality_table(q, label);
  if (!q.error.empty()) out += "note: " + q.error + "\n";
  return out;
}

}  // namespace

KsvdConfig LearnParams::config() const {
  KsvdConfig c;
  c.atoms = atoms;
  c.sparsity = OmpConfig{sparsity, 0.0};
  c.iterations = static_cast<int>(iterations);
  c.seed = seed;
  c.replace_unused = replace_unused;
  return c;
}

AdmmConfig AdmmParams::config(Index warm_start_sparsity) const {
  AdmmConfig c;
  c.lambda = lambda;
  c.gamma = gamma;
  c.mu = mu;
  c.max_iters = static_cast<int>(max_iters);
  c.primal_tol = primal_tol;
  c.dual_tol = dual_tol;
  c.warm_start_sparsity = warm_start_sparsity;
  return c;
}

PipelineConfig make_pipeline_config(const LearnParams& learn, const TransferParams& transfer,
                                    const AdmmParams& admm, bool baseline) {
  PipelineConfig cfg;
  cfg.ksvd = learn.config();
  cfg.transfer.eta = transfer.eta;
  cfg.transfer.k_scale = transfer.k;
  cfg.transfer.match_metric = parse_match_metric(transfer.metric);
  cfg.transfer.ksvd = cfg.ksvd;
  cfg.admm = admm.config(learn.sparsity);
  cfg.baseline = baseline;
  return cfg;
}

PipelineResult run_pipeline(const SpectralCube& source, const SpectralCube& target_ms,
                            const SpectralResponse& srf, const PipelineConfig& cfg) {
  const Matrix z = stage("input", [&] {
    require_valid(source, "source cube");
    require_valid(target_ms, "target cube");
    return as_matrix(source);
  });
  const Matrix y = as_matrix(target_ms);

  KsvdResult learned = stage("learn", [&] { return ksvd(z, cfg.ksvd); });

  MatchedSet matched;
  CompensationMatrix q;
  std::optional<SpectralDictionary> dict;
  if (cfg.baseline) {
    matched = stage("match", [&] {
      return build_matched_set(learned.dictionary, z, y, srf, cfg.transfer.match_metric);
    });
    q.values = Matrix::Zero(matched.z_matched.rows(), matched.z_matched.cols());
    dict = learned.dictionary;
  } else {
    auto t = stage("transfer",
                   [&] { return transfer(learned.dictionary, source, target_ms, srf, cfg.transfer); });
    matched = std::move(t.matched);
    q = std::move(t.compensation);
    dict = std::move(t.dictionary);
  }

  CoefficientMatrix a_u =
      stage("code", [&] { return batch_code(*dict, matched.z_matched, cfg.ksvd.sparsity); });
  AdmmSolution solution =
      stage("admm", [&] { return solve_coefficients(y, srf, *dict, a_u.values, cfg.admm); });
  SpectralCube estimate = stage(
      "reconstruct", [&] { return reconstruct(*dict, solution.a_x, target_ms.rows, target_ms.cols); });

  return PipelineResult{learned.dictionary, *dict,      std::move(matched), std::move(q),
                        std::move(a_u),     std::move(solution), std::move(estimate)};
}

json make_manifest(const std::string& command, const json& options) {
  json m = options;
  m["command"] = command;
  m["version"] = kVersion;
  m["timestamp"] = utc_timestamp();
  return m;
}

std::string cmd_synth(const SynthOptions& o) {
  SceneSpec spec;
  spec.bands = o.bands;
  spec.rows = static_cast<std::size_t>(o.rows);
  spec.cols = static_cast<std::size_t>(o.cols);
  spec.endmember_count = o.endmembers;
  spec.abundance_sparsity = o.sparsity;
  spec.seed = o.seed;
  spec.shift = DomainShift::uniform(o.bands, o.shift_offset, o.shift_gain, o.shift_sigma);

  const ScenePair pair = stage("synth", [&] { return make_scene_pair(spec); });
  const fs::path out = prepare_out_dir(o.out_dir);
  io::write_cube(pair.source, out / "source", io::SampleType::f64, "synthetic source scene Z");
  io::write_cube(pair.target, out / "target", io::SampleType::f64, "synthetic target scene X");
  io::export_matrix_csv(pair.endmembers, out / "endmembers.csv");
  io::write_srf(box_response(o.srf_bands, o.bands), out / "srf.csv");
  write_manifest(out, "synth", o);
  return "synth: wrote source/target cubes " + pair.source.shape_string() + ", endmembers and srf to " +
         out.string() + "\n";
}

std::string cmd_degrade(const DegradeOptions& o) {
  const SpectralCube x = io::read_cube(o.input);
  const SpectralResponse srf = io::read_srf(o.srf);
  const SpectralCube y =
      stage("degrade", [&] { return degrade(x, srf, NoiseSpec{o.noise_sigma, o.noise_seed}); });
  const fs::path out = prepare_out_dir(o.out_dir);
  io::write_cube(y, out / "degraded", parse_dtype(o.dtype));
  write_manifest(out, "degrade", o);
  return "degrade: " + x.shape_string() + " -> " + y.shape_string() + "\n";
}

std::string cmd_learn(const LearnOptions& o) {
  const SpectralCube cube = io::read_cube(o.input);
  const KsvdResult r = stage("learn", [&] { return ksvd(as_matrix(cube), o.learn.config()); });
  const fs::path out = prepare_out_dir(o.out_dir);
  io::write_dictionary(r.dictionary, out / "dictionary.csv");
  io::export_matrix_csv(r.codes.values, out / "codes.csv");
  std::ostringstream trace;
  trace << "iteration,residual\n";
  for (std::size_t i = 0; i < r.residual_trace.size(); ++i) {
    trace << i + 1 << ',' << io::format_double(r.residual_trace[i]) << '\n';
  }
  write_text(out / "trace.csv", trace.str());
  write_manifest(out, "learn", o);

  std::ostringstream os;
  os << "learn: " << r.dictionary.atoms() << " atoms over " << r.dictionary.bands() << " bands";
  if (!r.residual_trace.empty()) os << ", final residual " << r.residual_trace.back();
  if (r.degenerate) os << " (warning: no atom was used; returned the initialization)";
  if (r.more_atoms_than_samples) os << " (warning: more atoms than training columns)";
  os << "\n";
  return os.str();
}

std::string cmd_transfer(const TransferOptions& o) {
  const SpectralDictionary ds = io::read_dictionary(o.dictionary);
  const SpectralCube z = io::read_cube(o.source);
  const SpectralCube y = io::read_cube(o.target);
  const SpectralResponse srf = io::read_srf(o.srf);
  const auto cfg = make_pipeline_config(o.learn, o.transfer, AdmmParams{}, false);
  const TransferResult t = stage("transfer", [&] { return transfer(ds, z, y, srf, cfg.transfer); });

  const fs::path out = prepare_out_dir(o.out_dir);
  io::write_dictionary(t.dictionary, out / "D_t.csv");
  io::export_matrix_csv(t.compensation.values, out / "Q.csv");
  io::export_matrix_csv(t.matched.z_matched, out / "Z_s.csv");
  io::export_matrix_csv(t.matched.y_matched, out / "Y_s.csv");
  write_matches(out / "matches.csv", t.matched);
  write_manifest(out, "transfer", o);
  return "transfer: |Q|_F = " + io::format_double(t.compensation.values.norm()) + "\n";
}

std::string cmd_reconstruct(const ReconstructOptions& o) {
  const SpectralDictionary dt = io::read_dictionary(o.dictionary);
  const Matrix side = io::read_matrix_csv(o.side_spectra);
  const SpectralCube y = io::read_cube(o.target);
  const SpectralResponse srf = io::read_srf(o.srf);

  const CoefficientMatrix a_u =
      stage("code", [&] { return batch_code(dt, side, OmpConfig{o.sparsity, 0.0}); });
  const AdmmSolution sol = stage("admm", [&] {
    return solve_coefficients(as_matrix(y), srf, dt, a_u.values, o.admm.config(o.sparsity));
  });
  const SpectralCube xhat = stage("reconstruct", [&] { return reconstruct(dt, sol.a_x, y.rows, y.cols); });

  const fs::path out = prepare_out_dir(o.out_dir);
  io::export_matrix_csv(sol.a_x.values, out / "A_x.csv");
  io::write_cube(xhat, out / "estimate");
  write_admm_csv(out / "admm.csv", sol.diagnostics);
  std::string summary = "reconstruct: " + std::to_string(sol.diagnostics.iterations) +
                        " ADMM iterations" + (sol.diagnostics.converged ? "" : " (not converged)") + "\n";
  if (!o.truth.empty()) {
    const SpectralCube x = io::read_cube(o.truth);
    const QualityReport q = stage("evaluate", [&] { return evaluate_quality(x, xhat); });
    write_quality(out / "quality.csv", q);
    summary += describe(q, "estimate");
  }
  write_manifest(out, "reconstruct", o);
  return summary;
}

std::string cmd_evaluate(const EvaluateOptions& o) {
  const SpectralCube ref = io::read_cube(o.reference);
  const SpectralCube est = io::read_cube(o.estimate);
  const QualityReport q = stage("evaluate", [&] { return evaluate_quality(ref, est, o.ergas_ratio); });
  const fs::path out = prepare_out_dir(o.out_dir);
  write_quality(out / "quality.csv", q);
  write_manifest(out, "evaluate", o);
  return quality_csv_row(q) + "\n";
}

std::string cmd_pipeline(const PipelineOptions& o) {
  if (o.target_ms.empty() == o.target_hs.empty()) {
    throw InvariantError("pipeline: give exactly one of --target-ms or --target-hs");
  }
  const SpectralCube z = io::read_cube(o.source);
  const SpectralResponse srf = io::read_srf(o.srf);
  const bool degraded = !o.target_hs.empty();
  const SpectralCube y =
      degraded ? stage("degrade",
                       [&] {
                         return degrade(io::read_cube(o.target_hs), srf,
                                        NoiseSpec{o.noise_sigma, o.noise_seed});
                       })
               : io::read_cube(o.target_ms);
  const std::string truth_path = !o.truth.empty() ? o.truth : o.target_hs;

  const PipelineConfig cfg = make_pipeline_config(o.learn, o.transfer, o.admm, o.baseline);
  const PipelineResult r = run_pipeline(z, y, srf, cfg);

  const fs::path out = prepare_out_dir(o.out_dir);
  if (degraded) io::write_cube(y, out / "observed");
  io::write_dictionary(r.source_dictionary, out / "D_s.csv");
  io::write_dictionary(r.dictionary, out / "D_t.csv");
  io::export_matrix_csv(r.compensation.values, out / "Q.csv");
  io::export_matrix_csv(r.side_codes.values, out / "A_u.csv");
  io::export_matrix_csv(r.solution.a_x.values, out / "A_x.csv");
  write_matches(out / "matches.csv", r.matched);
  io::write_cube(r.estimate, out / "estimate");
  write_admm_csv(out / "admm.csv", r.solution.diagnostics);

  std::string summary = std::string("pipeline (") + (o.baseline ? "baseline" : "transfer") + "): " +
                        std::to_string(r.solution.diagnostics.iterations) + " ADMM iterations" +
                        (r.solution.diagnostics.converged ? "" : " (not converged)") + "\n";
  if (!truth_path.empty()) {
    const SpectralCube x = io::read_cube(truth_path);
    const QualityReport q = stage("evaluate", [&] { return evaluate_quality(x, r.estimate); });
    write_quality(out / "quality.csv", q);
    summary += describe(q, o.baseline ? "baseline" : "DTS");
  }
  write_manifest(out, "pipeline", o);
  return summary;
}

std::string rerun_manifest(const fs::path& manifest, const std::optional<std::string>& out_dir) {
  std::ifstream in(manifest);
  if (!in) throw IoError(manifest.string() + ": cannot open manifest");
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw IoError(manifest.string() + ": malformed manifest (" + e.what() + ")");
  }
  if (!m.is_object() || !m.contains("command") || !m["command"].is_string()) {
    throw IoError(manifest.string() + ": manifest has no 'command' field");
  }
  if (out_dir) m["out_dir"] = *out_dir;
  const std::string command = m["command"];
  try {
    if (command == "synth") return cmd_synth(m.get<SynthOptions>());
    if (command == "degrade") return cmd_degrade(m.get<DegradeOptions>());
    if (command == "learn") return cmd_learn(m.get<LearnOptions>());
    if (command == "transfer") return cmd_transfer(m.get<TransferOptions>());
    if (command == "reconstruct") return cmd_reconstruct(m.get<ReconstructOptions>());
    if (command == "evaluate") return cmd_evaluate(m.get<EvaluateOptions>());
    if (command == "pipeline") return cmd_pipeline(m.get<PipelineOptions>());
  } catch (const json::exception& e) {
    throw IoError(manifest.string() + ": bad manifest field (" + e.what() + ")");
  }
  throw IoError(manifest.string() + ": unknown command '" + command + "'");
}

void to_json(json& j, const SynthOptions& o) {
  j = json{{"bands", o.bands},         {"rows", o.rows},
           {"cols", o.cols},           {"endmembers", o.endmembers},
           {"sparsity", o.sparsity},   {"seed", o.seed},
           {"shift_offset", o.shift_offset}, {"shift_gain", o.shift_gain},
           {"shift_sigma", o.shift_sigma},   {"srf_bands", o.srf_bands},
           {"out_dir", o.out_dir}};
}

void from_json(const json& j, SynthOptions& o) {
  get_if(j, "bands", o.bands);
  get_if(j, "rows", o.rows);
  get_if(j, "cols", o.cols);
  get_if(j, "endmembers", o.endmembers);
  get_if(j, "sparsity", o.sparsity);
  get_if(j, "seed", o.seed);
  get_if(j, "shift_offset", o.shift_offset);
  get_if(j, "shift_gain", o.shift_gain);
  get_if(j, "shift_sigma", o.shift_sigma);
  get_if(j, "srf_bands", o.srf_bands);
  get_if(j, "out_dir", o.out_dir);
}

void to_json(json& j, const DegradeOptions& o) {
  j = json{{"input", o.input},           {"srf", o.srf},     {"noise_sigma", o.noise_sigma},
           {"noise_seed", o.noise_seed}, {"dtype", o.dtype}, {"out_dir", o.out_dir}};
}

void from_json(const json& j, DegradeOptions& o) {
  get_if(j, "input", o.input);
  get_if(j, "srf", o.srf);
  get_if(j, "noise_sigma", o.noise_sigma);
  get_if(j, "noise_seed", o.noise_seed);
  get_if(j, "dtype", o.dtype);
  get_if(j, "out_dir", o.out_dir);
}

void to_json(json& j, const LearnOptions& o) {
  j = json{{"input", o.input}, {"out_dir", o.out_dir}};
  put_learn(j, o.learn);
}

void from_json(const json& j, LearnOptions& o) {
  get_if(j, "input", o.input);
  get_if(j, "out_dir", o.out_dir);
  get_learn(j, o.learn);
}

void to_json(json& j, const TransferOptions& o) {
  j = json{{"dictionary", o.dictionary}, {"source", o.source}, {"target", o.target},
           {"srf", o.srf},               {"out_dir", o.out_dir}};
  put_transfer(j, o.transfer);
  put_learn(j, o.learn);
}

void from_json(const json& j, TransferOptions& o) {
  get_if(j, "dictionary", o.dictionary);
  get_if(j, "source", o.source);
  get_if(j, "target", o.target);
  get_if(j, "srf", o.srf);
  get_if(j, "out_dir", o.out_dir);
  get_transfer(j, o.transfer);
  get_learn(j, o.learn);
}

void to_json(json& j, const ReconstructOptions& o) {
  j = json{{"dictionary", o.dictionary}, {"side_spectra", o.side_spectra},
           {"target", o.target},         {"srf", o.srf},
           {"sparsity", o.sparsity},     {"truth", o.truth},
           {"out_dir", o.out_dir}};
  put_admm(j, o.admm);
}

void from_json(const json& j, ReconstructOptions& o) {
  get_if(j, "dictionary", o.dictionary);
  get_if(j, "side_spectra", o.side_spectra);
  get_if(j, "target", o.target);
  get_if(j, "srf", o.srf);
  get_if(j, "sparsity", o.sparsity);
  get_if(j, "truth", o.truth);
  get_if(j, "out_dir", o.out_dir);
  get_admm(j, o.admm);
}

void to_json(json& j, const EvaluateOptions& o) {
  j = json{{"reference", o.reference},
           {"estimate", o.estimate},
           {"ergas_ratio", o.ergas_ratio},
           {"out_dir", o.out_dir}};
}

void from_json(const json& j, EvaluateOptions& o) {
  get_if(j, "reference", o.reference);
  get_if(j, "estimate", o.estimate);
  get_if(j, "ergas_ratio", o.ergas_ratio);
  get_if(j, "out_dir", o.out_dir);
}

void to_json(json& j, const PipelineOptions& o) {
  j = json{{"source", o.source},
           {"target_ms", o.target_ms},
           {"target_hs", o.target_hs},
           {"srf", o.srf},
           {"truth", o.truth},
           {"baseline", o.baseline},
           {"noise_sigma", o.noise_sigma},
           {"noise_seed", o.noise_seed},
           {"out_dir", o.out_dir}};
  put_learn(j, o.learn);
  put_transfer(j, o.transfer);
  put_admm(j, o.admm);
}

void from_json(const json& j, PipelineOptions& o) {
  get_if(j, "source", o.source);
  get_if(j, "target_ms", o.target_ms);
  get_if(j, "target_hs", o.target_hs);
  get_if(j, "srf", o.srf);
  get_if(j, "truth", o.truth);
  get_if(j, "baseline", o.baseline);
  get_if(j, "noise_sigma", o.noise_sigma);
  get_if(j, "noise_seed", o.noise_seed);
  get_if(j, "out_dir", o.out_dir);
  get_learn(j, o.learn);
  get_transfer(j, o.transfer);
  get_admm(j, o.admm);
}

}  // namespace dts::app
