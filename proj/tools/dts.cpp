// dts: command-line front end for dictionary-transfer spectral super-resolution.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dts/app.hpp"
#include "dts/errors.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dts::app;

// Manifests record absolute paths so a rerun does not depend on the cwd.
void absolutize(std::string& path) {
  if (!path.empty()) path = fs::absolute(path).lexically_normal().string();
}

void add_learn_flags(CLI::App* cmd, LearnParams& p) {
  cmd->add_option("--atoms", p.atoms, "dictionary size K")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--sparsity", p.sparsity, "OMP atom budget per signal")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--iterations", p.iterations, "K-SVD iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--seed", p.seed, "dictionary initialization seed")->capture_default_str();
  cmd->add_option("--replace-unused", p.replace_unused, "replace atoms no signal uses")
      ->capture_default_str();
}

void add_transfer_flags(CLI::App* cmd, TransferParams& p) {
  cmd->add_option("--eta", p.eta, "similarity weight of the compensation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--k", p.k, "scale k in the similarity term")->capture_default_str();
  cmd->add_option("--metric", p.metric, "matching metric")
      ->check(CLI::IsMember({"euclidean", "spectral_angle"}))
      ->capture_default_str();
}

void add_admm_flags(CLI::App* cmd, AdmmParams& p) {
  cmd->add_option("--lambda", p.lambda, "l1 weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--gamma", p.gamma, "nuclear-norm weight")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--mu", p.mu, "ADMM penalty")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-iters", p.max_iters, "ADMM iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--primal-tol", p.primal_tol)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--dual-tol", p.dual_tol)->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compensation-based dictionary transfer for spectral super-resolution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic source/target scene pair");
  c_synth->add_option("--bands", synth.bands)->check(CLI::Range(2, 100000))->capture_default_str();
  c_synth->add_option("--rows", synth.rows)->check(CLI::PositiveNumber)->capture_default_str();
  c_synth->add_option("--cols", synth.cols)->check(CLI::PositiveNumber)->capture_default_str();
  c_synth->add_option("--endmembers", synth.endmembers)->check(CLI::PositiveNumber)->capture_default_str();
  c_synth->add_option("--sparsity", synth.sparsity, "endmembers mixed per pixel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();
  c_synth->add_option("--shift-offset", synth.shift_offset)->capture_default_str();
  c_synth->add_option("--shift-gain", synth.shift_gain)->check(CLI::PositiveNumber)->capture_default_str();
  c_synth->add_option("--shift-sigma", synth.shift_sigma, "endmember perturbation sigma")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_synth->add_option("--srf-bands", synth.srf_bands, "bands of the written box SRF")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_synth->add_option("--out-dir", synth.out_dir)->capture_default_str();

  DegradeOptions deg;
  auto* c_deg = app.add_subcommand("degrade", "apply an SRF (and optional noise) to a cube");
  c_deg->add_option("--input", deg.input, "cube base path")->required();
  c_deg->add_option("--srf", deg.srf, "SRF CSV")->required();
  c_deg->add_option("--noise-sigma", deg.noise_sigma)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_deg->add_option("--noise-seed", deg.noise_seed)->capture_default_str();
  c_deg->add_option("--dtype", deg.dtype)->check(CLI::IsMember({"f32", "f64"}))->capture_default_str();
  c_deg->add_option("--out-dir", deg.out_dir)->capture_default_str();

  LearnOptions learn;
  auto* c_learn = app.add_subcommand("learn", "learn a spectral dictionary with K-SVD");
  c_learn->add_option("--input", learn.input, "cube base path")->required();
  add_learn_flags(c_learn, learn.learn);
  c_learn->add_option("--out-dir", learn.out_dir)->capture_default_str();

  TransferOptions xfer;
  auto* c_xfer = app.add_subcommand("transfer", "transfer a source dictionary to the target domain");
  c_xfer->add_option("--dictionary", xfer.dictionary, "source dictionary CSV")->required();
  c_xfer->add_option("--source", xfer.source, "source scene cube")->required();
  c_xfer->add_option("--target", xfer.target, "observed multispectral cube")->required();
  c_xfer->add_option("--srf", xfer.srf, "SRF CSV")->required();
  add_transfer_flags(c_xfer, xfer.transfer);
  add_learn_flags(c_xfer, xfer.learn);
  c_xfer->add_option("--out-dir", xfer.out_dir)->capture_default_str();

  ReconstructOptions rec;
  auto* c_rec = app.add_subcommand("reconstruct", "solve for coefficients and reconstruct");
  c_rec->add_option("--dictionary", rec.dictionary, "transferred dictionary CSV")->required();
  c_rec->add_option("--side-spectra", rec.side_spectra, "matched source spectra CSV (Z_s.csv)")
      ->required();
  c_rec->add_option("--target", rec.target, "observed multispectral cube")->required();
  c_rec->add_option("--srf", rec.srf, "SRF CSV")->required();
  c_rec->add_option("--sparsity", rec.sparsity)->check(CLI::PositiveNumber)->capture_default_str();
  c_rec->add_option("--truth", rec.truth, "ground-truth cube for a quality report");
  add_admm_flags(c_rec, rec.admm);
  c_rec->add_option("--out-dir", rec.out_dir)->capture_default_str();

  EvaluateOptions ev;
  auto* c_ev = app.add_subcommand("evaluate", "MSE, PSNR, SAM, ERGAS of two cubes");
  c_ev->add_option("--reference", ev.reference)->required();
  c_ev->add_option("--estimate", ev.estimate)->required();
  c_ev->add_option("--ergas-ratio", ev.ergas_ratio)->check(CLI::PositiveNumber)->capture_default_str();
  c_ev->add_option("--out-dir", ev.out_dir)->capture_default_str();

  PipelineOptions pipe;
  auto* c_pipe = app.add_subcommand("pipeline", "run learn, transfer, ADMM and evaluation end to end");
  c_pipe->add_option("--source", pipe.source, "source scene cube (Z)")->required();
  auto* ms = c_pipe->add_option("--target-ms", pipe.target_ms, "observed multispectral cube (Y)");
  auto* hs = c_pipe->add_option("--target-hs", pipe.target_hs, "target hyperspectral cube to degrade (X)");
  ms->excludes(hs);
  c_pipe->add_option("--srf", pipe.srf, "SRF CSV")->required();
  c_pipe->add_option("--truth", pipe.truth, "ground truth for evaluation (default: --target-hs)");
  c_pipe->add_flag("--baseline", pipe.baseline, "use the source dictionary without transfer");
  c_pipe->add_option("--noise-sigma", pipe.noise_sigma)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_pipe->add_option("--noise-seed", pipe.noise_seed)->capture_default_str();
  add_learn_flags(c_pipe, pipe.learn);
  add_transfer_flags(c_pipe, pipe.transfer);
  add_admm_flags(c_pipe, pipe.admm);
  c_pipe->add_option("--out-dir", pipe.out_dir)->capture_default_str();

  std::string manifest;
  std::string rerun_out;
  auto* c_rerun = app.add_subcommand("rerun", "repeat a run from its manifest.json");
  c_rerun->add_option("manifest", manifest)->required();
  c_rerun->add_option("--out-dir", rerun_out, "write outputs here instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::string summary;
    if (c_synth->parsed()) {
      absolutize(synth.out_dir);
      summary = cmd_synth(synth);
    } else if (c_deg->parsed()) {
      for (auto* p : {&deg.input, &deg.srf, &deg.out_dir}) absolutize(*p);
      summary = cmd_degrade(deg);
    } else if (c_learn->parsed()) {
      for (auto* p : {&learn.input, &learn.out_dir}) absolutize(*p);
      summary = cmd_learn(learn);
    } else if (c_xfer->parsed()) {
      for (auto* p : {&xfer.dictionary, &xfer.source, &xfer.target, &xfer.srf, &xfer.out_dir}) {
        absolutize(*p);
      }
      summary = cmd_transfer(xfer);
    } else if (c_rec->parsed()) {
      for (auto* p : {&rec.dictionary, &rec.side_spectra, &rec.target, &rec.srf, &rec.truth,
                      &rec.out_dir}) {
        absolutize(*p);
      }
      summary = cmd_reconstruct(rec);
    } else if (c_ev->parsed()) {
      for (auto* p : {&ev.reference, &ev.estimate, &ev.out_dir}) absolutize(*p);
      summary = cmd_evaluate(ev);
    } else if (c_pipe->parsed()) {
      for (auto* p : {&pipe.source, &pipe.target_ms, &pipe.target_hs, &pipe.srf, &pipe.truth,
                      &pipe.out_dir}) {
        absolutize(*p);
      }
      summary = cmd_pipeline(pipe);
    } else if (c_rerun->parsed()) {
      std::optional<std::string> out;
      if (!rerun_out.empty()) {
        absolutize(rerun_out);
        out = rerun_out;
      }
      summary = rerun_manifest(manifest, out);
    }
    std::cout << summary;
  } catch (const dts::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
