#include "fcs/mask_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fcs/text_format.hpp"

namespace fcs::sampling {
namespace {

std::filesystem::path with_suffix(const std::filesystem::path &stem, const char *suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

std::string join_slopes(const std::vector<Slope> &slopes) {
  std::string out;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    if (i)
      out += ',';
    out += radon::to_token(slopes[i]);
  }
  return out;
}

std::string join_indices(const std::vector<std::size_t> &indices) {
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i)
      out += ',';
    out += std::to_string(indices[i]);
  }
  return out;
}

const char *lattice_name(Lattice l) { return l == Lattice::Native ? "native" : "next_prime"; }

} // namespace

void write_pbm(std::ostream &out, const MaskGrid &mask) {
  const int n = mask.size();
  out << "P4\n" << n << ' ' << n << '\n';
  const int row_bytes = (n + 7) / 8;
  std::string row(static_cast<std::size_t>(row_bytes), '\0');
  for (int x = 0; x < n; ++x) {
    std::fill(row.begin(), row.end(), '\0');
    for (int y = 0; y < n; ++y)
      if (mask(x, y))
        row[static_cast<std::size_t>(y / 8)] |= static_cast<char>(0x80u >> (y % 8));
    out.write(row.data(), row_bytes);
  }
  if (!out)
    throw std::runtime_error("failed writing PBM");
}

MaskGrid read_pbm(std::istream &in) {
  std::string magic;
  in >> magic;
  if (magic != "P4")
    throw std::runtime_error("not a binary PBM (P4) file");
  auto next_int = [&in]() {
    int value = 0;
    for (;;) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string comment;
        std::getline(in, comment);
        continue;
      }
      if (!(in >> value))
        throw std::runtime_error("malformed PBM header");
      return value;
    }
  };
  const int w = next_int();
  const int h = next_int();
  if (w != h)
    throw std::runtime_error("mask PBM must be square");
  in.get(); // single whitespace before raster
  MaskGrid mask(GridGeometry(w), 0);
  const int row_bytes = (w + 7) / 8;
  std::string row(static_cast<std::size_t>(row_bytes), '\0');
  for (int x = 0; x < h; ++x) {
    if (!in.read(row.data(), row_bytes))
      throw std::runtime_error("truncated PBM raster");
    for (int y = 0; y < w; ++y)
      mask(x, y) = (static_cast<unsigned char>(row[static_cast<std::size_t>(y / 8)]) >> (7 - y % 8)) & 1u;
  }
  return mask;
}

std::string sidecar_text(const SamplingMask &mask) {
  text::KeyValueWriter w;
  if (const auto *f = std::get_if<FractalProvenance>(&mask.provenance)) {
    w.add("kind", "pfrac");
    w.add("N", mask.geometry().size());
    w.add("lattice", lattice_name(f->spec.lattice));
    w.add("r", f->spec.r);
    w.add("mu", f->spec.mu);
    w.add("ctr", f->spec.ctr);
    w.add("seed", f->spec.seed);
    w.add("slopes", join_slopes(f->slopes));
  } else {
    const auto &c = std::get<CartesianProvenance>(mask.provenance);
    w.add("kind", mask.kind_name());
    w.add("N", mask.geometry().size());
    w.add("r", c.spec.r);
    w.add("alpha", c.spec.alpha);
    w.add("ctr", c.spec.ctr);
    w.add("seed", c.spec.seed);
    w.add("chosen", join_indices(c.chosen));
  }
  w.add("actual_reduction", actual_reduction(mask));
  return w.str();
}

void save_mask(const SamplingMask &mask, const std::filesystem::path &stem) {
  if (stem.has_parent_path())
    std::filesystem::create_directories(stem.parent_path());
  {
    std::ofstream out(with_suffix(stem, ".pbm"), std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot open " + with_suffix(stem, ".pbm").string());
    write_pbm(out, mask.selected);
  }
  std::ofstream meta(with_suffix(stem, ".meta"), std::ios::binary);
  if (!meta)
    throw std::runtime_error("cannot open " + with_suffix(stem, ".meta").string());
  meta << sidecar_text(mask);
}

SamplingMask load_mask(const std::filesystem::path &stem) {
  std::ifstream in(with_suffix(stem, ".pbm"), std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + with_suffix(stem, ".pbm").string());
  MaskGrid grid = read_pbm(in);

  std::ifstream meta_in(with_suffix(stem, ".meta"), std::ios::binary);
  if (!meta_in)
    throw std::runtime_error("cannot open " + with_suffix(stem, ".meta").string());
  std::stringstream buffer;
  buffer << meta_in.rdbuf();
  const auto doc = text::parse_key_values(buffer.str());
  const auto &kv = doc.global;

  const GridGeometry g(kv.get_int("N"));
  require_same_geometry(g, grid.geometry(), "mask sidecar");
  const std::string kind = kv.get("kind");
  if (kind == "pfrac") {
    FractalSpec spec{g};
    spec.lattice = kv.get("lattice") == "native" ? Lattice::Native : Lattice::NextPrime;
    spec.r = kv.get_double("r");
    spec.mu = kv.get_int("mu");
    spec.ctr = kv.get_double("ctr");
    spec.seed = kv.get_u64("seed");
    FractalProvenance prov{spec, {}};
    for (const auto &tok : text::split_list(kv.get("slopes")))
      prov.slopes.push_back(radon::parse_token(tok));
    return SamplingMask{std::move(grid), std::move(prov)};
  }
  if (kind == "cart1d" || kind == "cart2d") {
    CartesianSpec spec{g};
    spec.dims = kind == "cart1d" ? CartesianDims::OneD : CartesianDims::TwoD;
    spec.r = kv.get_double("r");
    spec.alpha = kv.get_double("alpha");
    spec.ctr = kv.get_double("ctr");
    spec.seed = kv.get_u64("seed");
    CartesianProvenance prov{spec, {}};
    for (const auto &tok : text::split_list(kv.get("chosen")))
      prov.chosen.push_back(static_cast<std::size_t>(std::stoull(tok)));
    return SamplingMask{std::move(grid), std::move(prov)};
  }
  throw std::runtime_error("unknown mask kind '" + kind + "'");
}

} // namespace fcs::sampling
