#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fcs/cs_baseline.hpp"
#include "fcs/recon.hpp"
#include "fcs/sampling.hpp"
#include "fcs/undersample.hpp"

namespace fcs::harness {

struct InputSpec {
  enum class Kind { Phantom, ImageFile, ComplexFile };
  std::string id;
  Kind kind = Kind::Phantom;
  /// Phantom side length.
  int n = 257;
  std::filesystem::path path;
  /// ComplexFile only: true when the file holds k-space, false for images.
  bool kspace = true;
  /// Zero-pad to the next prime side before sampling; metrics use the crop.
  bool pad = false;
};

struct MaskPlan {
  std::string id;
  /// "pfrac", "cart1d" or "cart2d".
  std::string kind = "pfrac";
  int mu = 0;
  double ctr = 0.0;
  double alpha = 0.0;
  sampling::Lattice lattice = sampling::Lattice::Native;
  std::optional<std::uint64_t> seed;
  /// Empty means the plan's targets.
  std::vector<double> targets;
};

struct ReconPlan {
  std::string id;
  recon::ReconConfig config;
  recon::NlmParams nlm;
  recon::CsBaselineConfig cs;
  /// Mask ids this configuration runs on; empty means all.
  std::vector<std::string> masks;
};

struct ExperimentPlan {
  std::uint64_t seed = 0;
  std::vector<double> targets;
  NoiseModel noise;
  std::vector<InputSpec> inputs;
  std::vector<MaskPlan> masks;
  std::vector<ReconPlan> recons;
  bool save_images = false;
  /// "pgm" or "png".
  std::string image_format = "pgm";
  bool save_logs = false;
  /// Measure wall time per cell; off by default so reruns are byte-identical.
  bool timing = false;

  void validate() const;
};

/// Parses a plan: top-level keys, then repeated [input], [mask] and [recon]
/// sections. Relative input paths resolve against `base_dir`.
ExperimentPlan parse_plan(const std::string &text, const std::filesystem::path &base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path &path);

struct CellResult {
  std::string input_id;
  int channel_count = 1;
  std::string mask_id;
  std::string mask_kind;
  int n = 0;
  double target_r = 0.0;
  double actual_r = 0.0;
  double ctr = 0.0;
  double alpha_or_mu = 0.0;
  std::uint64_t seed = 0;
  std::string recon_id;
  std::string solver;
  int iterations = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double rmse = 0.0;
  double wall_ms = 0.0;
  std::string status = "ok";
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int threads = 1;
};

/// Runs every input x mask x target x recon cell, writes
/// <out_dir>/results.csv (and images/logs when the plan asks) and returns the
/// rows in plan order. A failing cell records its error in `status`.
std::vector<CellResult> run_experiment(const ExperimentPlan &plan, const RunOptions &options);

void write_results_csv(std::ostream &out, const std::vector<CellResult> &rows);

const char *solver_name(recon::Solver solver);
recon::Solver parse_solver(const std::string &name);

} // namespace fcs::harness
