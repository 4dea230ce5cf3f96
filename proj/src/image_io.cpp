#include "fcs/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <png.h>

namespace fcs::harness {
namespace {

std::runtime_error io_error(const std::filesystem::path &path, const std::string &what) {
  return std::runtime_error(path.string() + ": " + what);
}

std::string lower_extension(const std::filesystem::path &path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::uint8_t to_byte(double v) {
  if (!std::isfinite(v))
    return 0;
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream &in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n')
        ;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty())
        break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

RealImage read_pgm(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error(path, "cannot open");
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P2")
    throw io_error(path, "not a PGM (magic '" + magic + "')");
  const int width = std::stoi(pnm_token(in));
  const int height = std::stoi(pnm_token(in));
  const int maxval = std::stoi(pnm_token(in));
  if (width != height)
    throw io_error(path, "image must be square, got " + std::to_string(width) + "x" + std::to_string(height));
  if (maxval < 1 || maxval > 65535)
    throw io_error(path, "bad maxval " + std::to_string(maxval));
  RealImage out{GridGeometry(width)};
  const double scale = 255.0 / maxval;
  const std::size_t count = out.geometry().pixel_count();
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string tok = pnm_token(in);
      if (tok.empty())
        throw io_error(path, "truncated pixel data");
      out[i] = std::stoi(tok) * scale;
    }
    return out;
  }
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes);
  in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw io_error(path, "truncated pixel data");
  for (std::size_t i = 0; i < count; ++i)
    out[i] = (bytes == 2 ? (raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i]) * scale;
  return out;
}

struct PngFile {
  std::FILE *fp = nullptr;
  ~PngFile() {
    if (fp)
      std::fclose(fp);
  }
};

RealImage read_png(const std::filesystem::path &path) {
  PngFile file{std::fopen(path.c_str(), "rb")};
  if (!file.fp)
    throw io_error(path, "cannot open");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw io_error(path, "libpng initialisation failed");
  }
  std::vector<std::vector<png_byte>> rows;
  int width = 0, height = 0, depth = 8;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw io_error(path, "invalid PNG");
  }
  png_init_io(png, file.fp);
  png_read_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE)
    png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA)
    png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (depth == 16)
    png_set_swap(png);
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  rows.assign(static_cast<std::size_t>(height), std::vector<png_byte>(rowbytes));
  std::vector<png_bytep> ptrs;
  for (auto &r : rows)
    ptrs.push_back(r.data());
  png_read_image(png, ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);

  if (width != height)
    throw io_error(path, "image must be square, got " + std::to_string(width) + "x" + std::to_string(height));
  RealImage out{GridGeometry(width)};
  const double scale = depth == 16 ? 255.0 / 65535.0 : 1.0;
  for (int x = 0; x < height; ++x)
    for (int y = 0; y < width; ++y) {
      const png_byte *p = rows[x].data();
      const int v = depth == 16 ? (p[2 * y] | p[2 * y + 1] << 8) : p[y];
      out(x, y) = v * scale;
    }
  return out;
}

void put_u32(std::ostream &out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char *>(b), 4);
}

std::uint32_t get_u32(const unsigned char *b) {
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_f64(std::ostream &out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i)
    b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char *>(b), 8);
}

double get_f64(const unsigned char *b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

} // namespace

RealImage read_image(const std::filesystem::path &path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png")
    return read_png(path);
  if (ext == ".pgm" || ext == ".pnm")
    return read_pgm(path);
  throw io_error(path, "unsupported image extension '" + ext + "' (expected .pgm or .png)");
}

void write_pgm(const RealImage &image, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw io_error(path, "cannot create");
  const int n = image.size();
  out << "P5\n" << n << ' ' << n << "\n255\n";
  std::vector<char> raw(image.geometry().pixel_count());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = static_cast<char>(to_byte(image[i]));
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out)
    throw io_error(path, "write failed");
}

void write_png(const RealImage &image, const std::filesystem::path &path) {
  PngFile file{std::fopen(path.c_str(), "wb")};
  if (!file.fp)
    throw io_error(path, "cannot create");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw io_error(path, "libpng initialisation failed");
  }
  const int n = image.size();
  std::vector<png_byte> rows(image.geometry().pixel_count());
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = to_byte(image[i]);
  std::vector<png_bytep> ptrs;
  for (int x = 0; x < n; ++x)
    ptrs.push_back(rows.data() + static_cast<std::size_t>(x) * n);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw io_error(path, "PNG encoding failed");
  }
  png_init_io(png, file.fp);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, n, n, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_image(const RealImage &image, const std::filesystem::path &path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png")
    write_png(image, path);
  else if (ext == ".pgm")
    write_pgm(image, path);
  else
    throw io_error(path, "unsupported image extension '" + ext + "' (expected .pgm or .png)");
}

void write_complex(const std::vector<KSpace> &channels, const std::filesystem::path &path) {
  if (channels.empty())
    throw std::invalid_argument("write_complex needs at least one channel");
  const GridGeometry g = channels.front().geometry();
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw io_error(path, "cannot create");
  out.write("FCSK", 4);
  put_u32(out, static_cast<std::uint32_t>(g.size()));
  put_u32(out, static_cast<std::uint32_t>(channels.size()));
  put_u32(out, 0); // reserved
  for (const KSpace &c : channels) {
    require_same_geometry(g, c.geometry(), "write_complex");
    for (const Complex &v : c.storage()) {
      put_f64(out, v.real());
      put_f64(out, v.imag());
    }
  }
  if (!out)
    throw io_error(path, "write failed");
}

std::vector<KSpace> read_complex(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error(path, "cannot open");
  unsigned char header[12];
  char magic[4];
  in.read(magic, 4);
  in.read(reinterpret_cast<char *>(header), 12);
  if (!in || std::memcmp(magic, "FCSK", 4) != 0)
    throw io_error(path, "missing FCSK header");
  const std::uint32_t n = get_u32(header);
  const std::uint32_t channels = get_u32(header + 4);
  if (n < 1 || n > 65536 || channels < 1 || channels > 1024)
    throw io_error(path, "implausible header (N=" + std::to_string(n) + ", channels=" + std::to_string(channels) + ")");
  const GridGeometry g(static_cast<int>(n));
  std::vector<unsigned char> raw(g.pixel_count() * 16);
  std::vector<KSpace> out;
  for (std::uint32_t c = 0; c < channels; ++c) {
    in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw io_error(path, "truncated channel " + std::to_string(c));
    KSpace k(g);
    for (std::size_t i = 0; i < g.pixel_count(); ++i)
      k[i] = Complex(get_f64(&raw[16 * i]), get_f64(&raw[16 * i + 8]));
    out.push_back(std::move(k));
  }
  return out;
}

} // namespace fcs::harness
