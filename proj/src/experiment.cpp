#include "fcs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fcs/fft.hpp"
#include "fcs/image_io.hpp"
#include "fcs/metrics.hpp"
#include "fcs/phantom.hpp"
#include "fcs/random.hpp"
#include "fcs/text_format.hpp"

namespace fcs::harness {
namespace {

using text::format_double;

// On the [0, 255] scale; far below one grey level.
constexpr double kExactRmse = 1e-9 * 255.0;

bool valid_id(const std::string &id) {
  if (id.empty())
    return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      return false;
  return true;
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

sampling::Lattice parse_lattice(const std::string &s) {
  if (s == "native")
    return sampling::Lattice::Native;
  if (s == "next_prime")
    return sampling::Lattice::NextPrime;
  throw std::runtime_error("unknown lattice '" + s + "' (expected native or next_prime)");
}

recon::HSchedule parse_schedule(const text::Section &s) {
  const std::string kind = s.get_or("schedule", "staged");
  const double h0 = s.get_double_or("h0", 0.0);
  if (kind == "staged")
    return recon::HSchedule::staged(h0);
  if (kind == "power")
    return recon::HSchedule::power_curve(h0, s.get_double_or("exponent", 1.0));
  throw std::runtime_error("unknown schedule '" + kind + "' (expected staged or power)");
}

InputSpec parse_input(const text::Section &s, const std::filesystem::path &base, std::size_t index) {
  InputSpec in;
  in.id = s.get_or("id", "input" + std::to_string(index));
  const std::string kind = s.get_or("kind", "phantom");
  if (kind == "phantom") {
    in.kind = InputSpec::Kind::Phantom;
    in.n = s.get_int_or("n", 257);
  } else if (kind == "image") {
    in.kind = InputSpec::Kind::ImageFile;
  } else if (kind == "complex") {
    in.kind = InputSpec::Kind::ComplexFile;
    const std::string domain = s.get_or("domain", "kspace");
    if (domain != "kspace" && domain != "image")
      throw std::runtime_error("input domain must be kspace or image, got '" + domain + "'");
    in.kspace = domain == "kspace";
  } else {
    throw std::runtime_error("unknown input kind '" + kind + "' (expected phantom, image or complex)");
  }
  if (in.kind != InputSpec::Kind::Phantom) {
    const std::filesystem::path p = s.get("path");
    in.path = p.is_absolute() || base.empty() ? p : base / p;
  }
  in.pad = s.get_bool_or("pad", false);
  return in;
}

MaskPlan parse_mask(const text::Section &s, std::size_t index) {
  MaskPlan m;
  m.kind = s.get_or("kind", "pfrac");
  if (m.kind != "pfrac" && m.kind != "cart1d" && m.kind != "cart2d")
    throw std::runtime_error("unknown mask kind '" + m.kind + "' (expected pfrac, cart1d or cart2d)");
  m.id = s.get_or("id", m.kind + std::to_string(index));
  m.mu = s.get_int_or("mu", 0);
  m.ctr = s.get_double_or("ctr", 0.0);
  m.alpha = s.get_double_or("alpha", 0.0);
  m.lattice = parse_lattice(s.get_or("lattice", "native"));
  if (s.has("seed"))
    m.seed = s.get_u64("seed");
  if (s.has("targets"))
    m.targets = text::parse_double_list(s.get("targets"));
  return m;
}

ReconPlan parse_recon(const text::Section &s, std::size_t index) {
  ReconPlan r;
  r.config.solver = parse_solver(s.get_or("solver", "ffr"));
  r.id = s.get_or("id", std::string(solver_name(r.config.solver)) + std::to_string(index));
  r.config.lambda_relax = s.get_double_or("lambda", 1.0);
  r.config.iterations = s.get_int_or("iterations", 100);
  r.config.denoise_every = s.get_int_or("denoise_every", 3);
  r.config.schedule = parse_schedule(s);
  r.nlm.patch_radius = s.get_int_or("patch_radius", r.nlm.patch_radius);
  r.nlm.search_radius = s.get_int_or("search_radius", r.nlm.search_radius);
  r.cs.wavelet_weight = s.get_double_or("wavelet_weight", r.cs.wavelet_weight);
  r.cs.tv_weight = s.get_double_or("tv_weight", r.cs.tv_weight);
  r.cs.tv_epsilon = s.get_double_or("tv_epsilon", r.cs.tv_epsilon);
  if (r.config.solver == recon::Solver::CsBaseline)
    r.cs.iterations = s.get_int_or("iterations", r.cs.iterations);
  if (s.has("masks"))
    r.masks = text::split_list(s.get("masks"));
  return r;
}

struct LoadedInput {
  /// Image-domain channels at the working (possibly padded) size.
  std::vector<Image> channels;
  /// Magnitude ground truth at the original size.
  RealImage truth;
  int original = 0;
  int offset = 0;
};

LoadedInput load_input(const InputSpec &spec) {
  std::vector<Image> channels;
  switch (spec.kind) {
  case InputSpec::Kind::Phantom:
    channels.push_back(to_complex(shepp_logan(spec.n)));
    break;
  case InputSpec::Kind::ImageFile:
    channels.push_back(to_complex(read_image(spec.path)));
    break;
  case InputSpec::Kind::ComplexFile:
    for (const KSpace &k : read_complex(spec.path))
      channels.push_back(spec.kspace ? fft::inverse_2d(k) : reinterpret_domain<Image>(k));
    break;
  }
  LoadedInput out{{}, recon::rss_combine(channels), channels.front().size(), 0};
  for (Image &c : channels) {
    if (spec.pad) {
      auto padded = pad_to_prime(c);
      out.offset = padded.offset;
      out.channels.push_back(std::move(padded.image));
    } else {
      out.channels.push_back(std::move(c));
    }
  }
  return out;
}

sampling::SamplingMask build_mask(const MaskPlan &m, const GridGeometry &g, double target, std::uint64_t seed) {
  if (m.kind == "pfrac") {
    sampling::FractalSpec spec{g, 0.0, m.mu, m.ctr, seed, m.lattice};
    return sampling::build_pfrac(sampling::fit_pfrac(spec, target));
  }
  const auto dims = m.kind == "cart1d" ? sampling::CartesianDims::OneD : sampling::CartesianDims::TwoD;
  sampling::CartesianSpec spec{g, 1.0, m.alpha, m.ctr, seed, dims};
  return sampling::build_cartesian(sampling::fit_cartesian(spec, target));
}

struct Cell {
  std::size_t input, mask, target_index, recon;
  double target;
};

struct CellOutput {
  CellResult row;
  std::optional<RealImage> zf, recon, error;
  std::vector<recon::IterationRecord> log;
};

Image solve(const recon::MaskedKSpace &y, const ReconPlan &plan, std::vector<recon::IterationRecord> &log) {
  switch (plan.config.solver) {
  case recon::Solver::ZeroFill:
    return recon::zero_fill(y);
  case recon::Solver::FFR: {
    auto r = recon::ffr(y, plan.config, plan.nlm);
    log = std::move(r.log);
    return std::move(r.image);
  }
  case recon::Solver::FSIRT: {
    const auto *prov = std::get_if<sampling::FractalProvenance>(&y.mask.provenance);
    if (!prov)
      throw std::invalid_argument("fSIRT needs a fractal mask");
    // With no centre disk the mask is exactly the union of the slices, so the
    // zero-fill image carries the measured projections.
    const radon::Sinogram g = radon::drt_forward(recon::zero_fill(y), prov->slopes);
    auto r = recon::fsirt(g, y.mask, plan.config, plan.nlm);
    log = std::move(r.log);
    return std::move(r.image);
  }
  case recon::Solver::CsBaseline:
    return recon::cs_baseline(y, plan.cs).image;
  }
  throw std::logic_error("unhandled solver");
}

std::uint64_t mask_seed(const ExperimentPlan &plan, std::size_t mask, std::size_t target_index) {
  if (plan.masks[mask].seed)
    return *plan.masks[mask].seed;
  return derive_seed(derive_seed(plan.seed, static_cast<std::uint64_t>(Stream::Cell)), mask, target_index);
}

std::uint64_t noise_seed(const ExperimentPlan &plan, const Cell &c) {
  return derive_seed(derive_seed(plan.seed, static_cast<std::uint64_t>(Stream::Noise)), c.input,
                     c.mask << 20 | c.target_index);
}

CellOutput run_cell(const ExperimentPlan &plan, const std::vector<LoadedInput> &inputs, const Cell &cell) {
  CellOutput out;
  CellResult &row = out.row;
  const InputSpec &in_spec = plan.inputs[cell.input];
  const MaskPlan &mplan = plan.masks[cell.mask];
  const ReconPlan &rplan = plan.recons[cell.recon];
  const LoadedInput &input = inputs[cell.input];
  row.input_id = in_spec.id;
  row.channel_count = static_cast<int>(input.channels.size());
  row.mask_id = mplan.id;
  row.mask_kind = mplan.kind;
  row.n = input.channels.front().size();
  row.target_r = cell.target;
  row.ctr = mplan.ctr;
  row.alpha_or_mu = mplan.kind == "pfrac" ? mplan.mu : mplan.alpha;
  row.seed = mask_seed(plan, cell.mask, cell.target_index);
  row.recon_id = rplan.id;
  row.solver = solver_name(rplan.config.solver);
  row.iterations = rplan.config.solver == recon::Solver::ZeroFill ? 0
                   : rplan.config.solver == recon::Solver::CsBaseline ? rplan.cs.iterations
                                                                      : rplan.config.iterations;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto mask = build_mask(mplan, input.channels.front().geometry(), cell.target, row.seed);
    row.actual_r = sampling::actual_reduction(mask);
    const std::uint64_t nseed = noise_seed(plan, cell);
    std::vector<Image> zf, rec;
    for (std::size_t c = 0; c < input.channels.size(); ++c) {
      const auto y = undersample(input.channels[c], mask, plan.noise, derive_seed(nseed, c));
      zf.push_back(recon::zero_fill(y));
      rec.push_back(solve(y, rplan, out.log));
    }
    RealImage truth = input.truth;
    RealImage final_img = crop(recon::rss_combine(rec), input.original, input.offset);
    metrics::normalise_jointly(truth, final_img);
    const auto m = metrics::evaluate(truth, final_img);
    // Exact recoveries differ from the truth only by transform round-off.
    row.psnr_db = m.rmse <= kExactRmse ? metrics::kInfinitePsnr : m.psnr;
    row.ssim = m.ssim;
    row.rmse = m.rmse;
    if (plan.save_images) {
      RealImage zf_truth = input.truth;
      RealImage zf_img = crop(recon::rss_combine(zf), input.original, input.offset);
      metrics::normalise_jointly(zf_truth, zf_img);
      RealImage error = final_img;
      for (std::size_t i = 0; i < error.storage().size(); ++i)
        error[i] = std::abs(truth[i] - final_img[i]);
      out.zf = std::move(zf_img);
      out.error = std::move(error);
      out.recon = std::move(final_img);
    }
  } catch (const std::exception &e) {
    row.status = std::string("error: ") + e.what();
  }
  if (plan.timing)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string cell_label(const CellResult &r) {
  return r.input_id + "_" + r.mask_id + "_R" + format_double(r.target_r) + "_" + r.recon_id;
}

} // namespace

const char *solver_name(recon::Solver solver) {
  switch (solver) {
  case recon::Solver::FFR:
    return "ffr";
  case recon::Solver::FSIRT:
    return "fsirt";
  case recon::Solver::CsBaseline:
    return "cs";
  case recon::Solver::ZeroFill:
    return "zf";
  }
  return "?";
}

recon::Solver parse_solver(const std::string &name) {
  if (name == "ffr")
    return recon::Solver::FFR;
  if (name == "fsirt")
    return recon::Solver::FSIRT;
  if (name == "cs" || name == "cs_baseline")
    return recon::Solver::CsBaseline;
  if (name == "zf" || name == "zero_fill")
    return recon::Solver::ZeroFill;
  throw std::runtime_error("unknown solver '" + name + "' (expected ffr, fsirt, cs or zf)");
}

void ExperimentPlan::validate() const {
  if (inputs.empty() || masks.empty() || recons.empty())
    throw std::invalid_argument("a plan needs at least one [input], one [mask] and one [recon]");
  noise.validate();
  if (image_format != "pgm" && image_format != "png")
    throw std::invalid_argument("image_format must be pgm or png");
  std::set<std::string> mask_ids;
  auto check_ids = [](const auto &items, const char *what) {
    std::set<std::string> seen;
    for (const auto &item : items) {
      if (!valid_id(item.id))
        throw std::invalid_argument(std::string(what) + " id '" + item.id + "' may only use letters, digits, _ - .");
      if (!seen.insert(item.id).second)
        throw std::invalid_argument(std::string("duplicate ") + what + " id '" + item.id + "'");
    }
    return seen;
  };
  check_ids(inputs, "input");
  mask_ids = check_ids(masks, "mask");
  check_ids(recons, "recon");
  for (const auto &m : masks) {
    const auto &t = m.targets.empty() ? targets : m.targets;
    if (t.empty())
      throw std::invalid_argument("mask '" + m.id + "' has no reduction targets");
    for (double r : t)
      if (!(r >= 1.0))
        throw std::invalid_argument("reduction targets must be >= 1");
  }
  for (const auto &r : recons) {
    r.config.validate();
    r.nlm.validate();
    r.cs.validate();
    for (const auto &id : r.masks)
      if (!mask_ids.count(id))
        throw std::invalid_argument("recon '" + r.id + "' names unknown mask '" + id + "'");
  }
}

ExperimentPlan parse_plan(const std::string &text, const std::filesystem::path &base_dir) {
  const text::Document doc = text::parse_key_values(text);
  ExperimentPlan plan;
  plan.seed = doc.global.get_u64_or("seed", 0);
  if (doc.global.has("targets"))
    plan.targets = text::parse_double_list(doc.global.get("targets"));
  plan.noise.sigma = doc.global.get_double_or("noise_sigma", 0.0);
  plan.save_images = doc.global.get_bool_or("save_images", false);
  plan.image_format = doc.global.get_or("image_format", "pgm");
  plan.save_logs = doc.global.get_bool_or("save_logs", false);
  plan.timing = doc.global.get_bool_or("timing", false);
  for (const auto &s : doc.sections) {
    if (s.name == "input")
      plan.inputs.push_back(parse_input(s, base_dir, plan.inputs.size()));
    else if (s.name == "mask")
      plan.masks.push_back(parse_mask(s, plan.masks.size()));
    else if (s.name == "recon")
      plan.recons.push_back(parse_recon(s, plan.recons.size()));
    else
      throw std::runtime_error("unknown section [" + s.name + "] at line " + std::to_string(s.line));
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error(path.string() + ": cannot open plan");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_plan(text.str(), path.parent_path());
}

void write_results_csv(std::ostream &out, const std::vector<CellResult> &rows) {
  out << "input_id,channel_count,mask_kind,N,target_R,actual_R,ctr,alpha_or_mu,seed,solver,iterations,"
         "psnr_db,ssim,rmse,wall_ms,status\n";
  for (const auto &r : rows) {
    out << csv_field(r.input_id) << ',' << r.channel_count << ',' << r.mask_kind << ',' << r.n << ','
        << format_double(r.target_r) << ',' << format_double(r.actual_r) << ',' << format_double(r.ctr) << ','
        << format_double(r.alpha_or_mu) << ',' << r.seed << ',' << r.solver << ',' << r.iterations << ','
        << format_double(r.psnr_db) << ',' << format_double(r.ssim) << ',' << format_double(r.rmse) << ','
        << format_double(r.wall_ms) << ',' << csv_field(r.status) << '\n';
  }
}

std::vector<CellResult> run_experiment(const ExperimentPlan &plan, const RunOptions &options) {
  plan.validate();
  std::vector<LoadedInput> inputs;
  for (const auto &spec : plan.inputs)
    inputs.push_back(load_input(spec));

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < plan.inputs.size(); ++i)
    for (std::size_t m = 0; m < plan.masks.size(); ++m) {
      const auto &targets = plan.masks[m].targets.empty() ? plan.targets : plan.masks[m].targets;
      for (std::size_t t = 0; t < targets.size(); ++t)
        for (std::size_t r = 0; r < plan.recons.size(); ++r) {
          const auto &allowed = plan.recons[r].masks;
          if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), plan.masks[m].id) == allowed.end())
            continue;
          cells.push_back({i, m, t, r, targets[t]});
        }
    }

  std::filesystem::create_directories(options.out_dir);
  const std::filesystem::path cell_dir = options.out_dir / "cells";
  if (plan.save_images || plan.save_logs)
    std::filesystem::create_directories(cell_dir);

  std::vector<CellResult> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string io_error;
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      CellOutput out = run_cell(plan, inputs, cells[k]);
      try {
        const std::string label = cell_label(out.row);
        if (out.recon) {
          const std::string ext = "." + plan.image_format;
          write_image(*out.zf, cell_dir / (label + "_zf" + ext));
          write_image(*out.recon, cell_dir / (label + "_recon" + ext));
          write_image(*out.error, cell_dir / (label + "_error" + ext));
        }
        if (plan.save_logs && !out.log.empty()) {
          std::ofstream log(cell_dir / (label + "_iterations.csv"));
          recon::write_iteration_csv(log, out.log);
        }
      } catch (const std::exception &e) {
        std::lock_guard lock(error_mutex);
        if (io_error.empty())
          io_error = e.what();
      }
      rows[k] = std::move(out.row);
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  if (!io_error.empty())
    throw std::runtime_error(io_error);

  std::ofstream csv(options.out_dir / "results.csv", std::ios::binary);
  if (!csv)
    throw std::runtime_error((options.out_dir / "results.csv").string() + ": cannot create");
  write_results_csv(csv, rows);
  return rows;
}

} // namespace fcs::harness
