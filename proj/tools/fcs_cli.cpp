#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fcs/cs_baseline.hpp"
#include "fcs/experiment.hpp"
#include "fcs/fft.hpp"
#include "fcs/finite_radon.hpp"
#include "fcs/image_io.hpp"
#include "fcs/incoherence.hpp"
#include "fcs/mask_io.hpp"
#include "fcs/metrics.hpp"
#include "fcs/phantom.hpp"
#include "fcs/random.hpp"
#include "fcs/recon.hpp"
#include "fcs/text_format.hpp"
#include "fcs/undersample.hpp"

namespace fs = std::filesystem;
using namespace fcs;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
  int threads = 1;

  fs::path out(const fs::path &p) const { return p.is_absolute() ? p : out_dir / p; }
};

struct MaskArgs {
  std::string kind = "pfrac";
  int n = 257;
  std::optional<double> target;
  std::optional<double> r;
  int mu = 0;
  double ctr = 0.0;
  double alpha = 0.0;
  std::string lattice = "native";

  void add_to(CLI::App *cmd) {
    cmd->add_option("--kind", kind, "pfrac, cart1d or cart2d")
        ->check(CLI::IsMember({"pfrac", "cart1d", "cart2d"}))
        ->capture_default_str();
    cmd->add_option("-n,--size", n, "grid side N")->capture_default_str();
    cmd->add_option("--target", target, "reduction factor to fit (closest at or above)");
    cmd->add_option("--r", r, "fraction of lines (pfrac) or rows/points (cartesian)");
    cmd->add_option("--mu", mu, "deterministic lines (pfrac)")->capture_default_str();
    cmd->add_option("--ctr", ctr, "radius of the fully sampled centre disk")->capture_default_str();
    cmd->add_option("--alpha", alpha, "variable-density exponent (cartesian)")->capture_default_str();
    cmd->add_option("--lattice", lattice, "native or next_prime (pfrac)")
        ->check(CLI::IsMember({"native", "next_prime"}))
        ->capture_default_str();
  }

  sampling::SamplingMask build(std::uint64_t seed) const {
    const GridGeometry g(n);
    if (target && r)
      throw std::invalid_argument("give either --target or --r, not both");
    if (kind == "pfrac") {
      sampling::FractalSpec spec{g, r.value_or(0.0), mu, ctr, seed,
                                 lattice == "native" ? sampling::Lattice::Native : sampling::Lattice::NextPrime};
      if (target)
        spec = sampling::fit_pfrac(spec, *target);
      return sampling::build_pfrac(spec);
    }
    sampling::CartesianSpec spec{g, r.value_or(1.0), alpha, ctr, seed,
                                 kind == "cart1d" ? sampling::CartesianDims::OneD : sampling::CartesianDims::TwoD};
    if (target)
      spec = sampling::fit_cartesian(spec, *target);
    return sampling::build_cartesian(spec);
  }
};

void print_report(const incoherence::IncoherenceReport &rep, const fs::path &csv) {
  if (csv.empty()) {
    incoherence::write_csv_header(std::cout);
    incoherence::write_csv_row(std::cout, rep);
    return;
  }
  std::ofstream out(csv);
  incoherence::write_csv_header(out);
  incoherence::write_csv_row(out, rep);
  std::cout << "spr " << text::format_double(rep.spr) << " -> " << csv.string() << '\n';
}

RealImage normalised_for_display(RealImage img) {
  double peak = 0.0;
  for (double v : img.storage())
    peak = std::max(peak, v);
  if (peak > 0.0)
    for (double &v : img.storage())
      v *= 255.0 / peak;
  return img;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Finite compressive sensing toolkit: fractal sampling, incoherence and reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "global random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for outputs")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  // mask
  auto *mask_cmd = app.add_subcommand("mask", "build a sampling mask, or inspect a saved one");
  MaskArgs mask_args;
  mask_args.add_to(mask_cmd);
  std::string mask_name = "mask";
  fs::path inspect;
  mask_cmd->add_option("--name", mask_name, "output stem (writes <stem>.pbm and <stem>.meta)")->capture_default_str();
  mask_cmd->add_option("--inspect", inspect, "print the provenance and SPR of a saved mask stem");

  // spr
  auto *spr_cmd = app.add_subcommand("spr", "incoherence (sidelobe-to-peak ratio) of a mask or mask ensemble");
  MaskArgs spr_args;
  spr_args.add_to(spr_cmd);
  int samples = 1, bases = 0;
  fs::path spr_csv, spr_mask;
  spr_cmd->add_option("--samples", samples, "masks to draw (each with its own derived seed)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spr_cmd->add_option("--bases", bases, "random basis columns per mask; 0 = exact PSF")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  spr_cmd->add_option("--mask", spr_mask, "evaluate a saved mask stem instead of building one");
  spr_cmd->add_option("--csv", spr_csv, "write the report here instead of stdout");

  // phantom
  auto *ph_cmd = app.add_subcommand("phantom", "write a Shepp-Logan phantom");
  int ph_n = 257;
  fs::path ph_out = "phantom.pgm";
  ph_cmd->add_option("-n,--size", ph_n, "side length")->capture_default_str();
  ph_cmd->add_option("-o,--out", ph_out, "output .pgm/.png")->capture_default_str();

  // pad
  auto *pad_cmd = app.add_subcommand("pad", "zero-pad an image to the next prime side");
  fs::path pad_in, pad_out;
  pad_cmd->add_option("input", pad_in, "input .pgm/.png")->required();
  pad_cmd->add_option("-o,--out", pad_out, "output .pgm/.png")->required();

  // undersample
  auto *us_cmd = app.add_subcommand("undersample", "retrospectively under-sample an image or k-space file");
  fs::path us_image, us_complex, us_mask, us_out = "measured.fcsk";
  double sigma = 0.0;
  auto *us_img_opt = us_cmd->add_option("--image", us_image, "ground-truth image (.pgm/.png)");
  us_cmd->add_option("--kspace", us_complex, "fully sampled k-space (.fcsk)")->excludes(us_img_opt);
  us_cmd->add_option("--mask", us_mask, "mask stem")->required();
  us_cmd->add_option("--sigma", sigma, "complex noise standard deviation")->capture_default_str();
  us_cmd->add_option("-o,--out", us_out, "output k-space (.fcsk)")->capture_default_str();

  // recon
  auto *rc_cmd = app.add_subcommand("recon", "reconstruct under-sampled k-space");
  fs::path rc_in, rc_mask, rc_out = "recon.pgm", rc_truth, rc_log;
  std::string solver = "ffr", schedule = "staged";
  recon::ReconConfig rc_config;
  recon::NlmParams nlm;
  recon::CsBaselineConfig cs;
  double h0 = 15.0, exponent = 1.0;
  int crop_to = 0, crop_offset = 0;
  rc_cmd->add_option("--kspace", rc_in, "measured k-space (.fcsk)")->required();
  rc_cmd->add_option("--mask", rc_mask, "mask stem")->required();
  rc_cmd->add_option("--solver", solver, "ffr, fsirt, cs or zf")
      ->check(CLI::IsMember({"ffr", "fsirt", "cs", "zf"}))
      ->capture_default_str();
  rc_cmd->add_option("--iterations", rc_config.iterations, "iterations (ffr, fsirt, cs)")->capture_default_str();
  rc_cmd->add_option("--lambda", rc_config.lambda_relax, "relaxation in (0, 2)")->capture_default_str();
  rc_cmd->add_option("--denoise-every", rc_config.denoise_every, "iterations between NLM passes")
      ->capture_default_str();
  rc_cmd->add_option("--schedule", schedule, "staged or power")
      ->check(CLI::IsMember({"staged", "power"}))
      ->capture_default_str();
  rc_cmd->add_option("--h0", h0, "initial NLM strength")->capture_default_str();
  rc_cmd->add_option("--exponent", exponent, "power-curve exponent")->capture_default_str();
  rc_cmd->add_option("--patch-radius", nlm.patch_radius)->capture_default_str();
  rc_cmd->add_option("--search-radius", nlm.search_radius)->capture_default_str();
  rc_cmd->add_option("--tv-weight", cs.tv_weight)->capture_default_str();
  rc_cmd->add_option("--wavelet-weight", cs.wavelet_weight)->capture_default_str();
  rc_cmd->add_option("--crop", crop_to, "crop the result to this side (undo pad)");
  rc_cmd->add_option("--crop-offset", crop_offset, "offset of the crop")->capture_default_str();
  rc_cmd->add_option("--truth", rc_truth, "ground-truth image for PSNR/SSIM/RMSE");
  rc_cmd->add_option("--log", rc_log, "per-iteration CSV (ffr, fsirt)");
  rc_cmd->add_option("-o,--out", rc_out, "magnitude image (.pgm/.png)")->capture_default_str();

  // run
  auto *run_cmd = app.add_subcommand("run", "run an experiment plan");
  fs::path plan_path;
  run_cmd->add_option("plan", plan_path, "plan file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mask_cmd) {
      if (!inspect.empty()) {
        const auto m = sampling::load_mask(inspect);
        std::cout << sampling::sidecar_text(m);
        std::cout << "spr = " << text::format_double(incoherence::spr_exact_value(m.selected)) << '\n';
        return 0;
      }
      fs::create_directories(g.out_dir);
      const auto m = mask_args.build(g.seed);
      sampling::save_mask(m, g.out(mask_name));
      std::cout << sampling::sidecar_text(m);
    } else if (*spr_cmd) {
      incoherence::IncoherenceReport rep;
      if (!spr_mask.empty()) {
        const auto m = sampling::load_mask(spr_mask);
        rep = bases > 0 ? incoherence::spr_monte_carlo(m, samples, bases, g.seed) : incoherence::spr_exact(m);
      } else if (samples == 1 && bases == 0) {
        rep = incoherence::spr_exact(spr_args.build(g.seed));
      } else {
        rep = incoherence::spr_ensemble([&](std::uint64_t s) { return spr_args.build(s); }, samples, bases, g.seed,
                                        g.threads);
      }
      if (spr_args.target)
        rep.target_r = *spr_args.target;
      print_report(rep, spr_csv.empty() ? spr_csv : g.out(spr_csv));
    } else if (*ph_cmd) {
      fs::create_directories(g.out_dir);
      harness::write_image(harness::shepp_logan(ph_n), g.out(ph_out));
    } else if (*pad_cmd) {
      fs::create_directories(g.out_dir);
      const auto padded = harness::pad_to_prime(harness::read_image(pad_in));
      harness::write_image(padded.image, g.out(pad_out));
      std::cout << "original = " << padded.original << "\noffset = " << padded.offset
                << "\nsize = " << padded.image.size() << '\n';
    } else if (*us_cmd) {
      if (us_image.empty() == us_complex.empty())
        throw std::invalid_argument("give exactly one of --image or --kspace");
      fs::create_directories(g.out_dir);
      const auto m = sampling::load_mask(us_mask);
      std::vector<KSpace> full;
      if (!us_image.empty())
        full.push_back(fft::forward_2d(to_complex(harness::read_image(us_image))));
      else
        full = harness::read_complex(us_complex);
      std::vector<KSpace> measured;
      for (std::size_t c = 0; c < full.size(); ++c)
        measured.push_back(harness::undersample(full[c], m, {sigma}, derive_seed(g.seed, c)).data);
      harness::write_complex(measured, g.out(us_out));
    } else if (*rc_cmd) {
      fs::create_directories(g.out_dir);
      const auto m = sampling::load_mask(rc_mask);
      rc_config.solver = harness::parse_solver(solver);
      rc_config.schedule =
          schedule == "staged" ? recon::HSchedule::staged(h0) : recon::HSchedule::power_curve(h0, exponent);
      cs.iterations = rc_config.iterations;
      std::vector<Image> channels;
      std::vector<recon::IterationRecord> log;
      for (const KSpace &k : harness::read_complex(rc_in)) {
        const recon::MaskedKSpace y{k, m};
        switch (rc_config.solver) {
        case recon::Solver::ZeroFill:
          channels.push_back(recon::zero_fill(y));
          break;
        case recon::Solver::CsBaseline:
          channels.push_back(recon::cs_baseline(y, cs).image);
          break;
        case recon::Solver::FFR: {
          auto r = recon::ffr(y, rc_config, nlm);
          log = r.log;
          channels.push_back(std::move(r.image));
          break;
        }
        case recon::Solver::FSIRT: {
          const auto &prov = std::get<sampling::FractalProvenance>(m.provenance);
          auto r = recon::fsirt(radon::drt_forward(recon::zero_fill(y), prov.slopes), m, rc_config, nlm);
          log = r.log;
          channels.push_back(std::move(r.image));
          break;
        }
        }
      }
      RealImage image = recon::rss_combine(channels);
      if (crop_to > 0)
        image = harness::crop(image, crop_to, crop_offset);
      if (!rc_truth.empty()) {
        RealImage truth = harness::read_image(rc_truth);
        metrics::normalise_jointly(truth, image);
        const auto rep = metrics::evaluate(truth, image);
        std::cout << "psnr_db = " << text::format_double(rep.psnr) << "\nssim = " << text::format_double(rep.ssim)
                  << "\nrmse = " << text::format_double(rep.rmse) << '\n';
      } else {
        image = normalised_for_display(std::move(image));
      }
      harness::write_image(image, g.out(rc_out));
      if (!rc_log.empty()) {
        std::ofstream out(g.out(rc_log));
        recon::write_iteration_csv(out, log);
      }
    } else if (*run_cmd) {
      auto plan = harness::load_plan(plan_path);
      if (app.get_option("--seed")->count() > 0)
        plan.seed = g.seed;
      const auto rows = harness::run_experiment(plan, {g.out_dir, g.threads});
      std::size_t failed = 0;
      for (const auto &r : rows)
        failed += r.status != "ok";
      std::cout << rows.size() << " cells, " << failed << " failed -> " << (g.out_dir / "results.csv").string()
                << '\n';
      return failed ? 2 : 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "fcs: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
