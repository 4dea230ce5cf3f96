#pragma once

#include <filesystem>
#include <vector>

#include "fcs/grid.hpp"

// Grayscale image files. Row r of the file holds x = r; column c holds y = c.
namespace fcs::harness {

/// Reads an 8- or 16-bit PGM (P5 or P2) or a grayscale PNG. The image must be
/// square. Intensities are rescaled to [0, 255] by the format's maxval.
RealImage read_image(const std::filesystem::path &path);

/// 8-bit output: values are rounded and clipped to [0, 255]. The format is
/// chosen by extension (.pgm or .png). PNG uses fixed encoder settings so
/// equal images produce equal bytes.
void write_image(const RealImage &image, const std::filesystem::path &path);
void write_pgm(const RealImage &image, const std::filesystem::path &path);
void write_png(const RealImage &image, const std::filesystem::path &path);

/// Complex data files: 16-byte header ("FCSK", u32 N, u32 channels, u32 0) followed
/// by each channel as little-endian f64 (re, im) pairs in row-major order.
void write_complex(const std::vector<KSpace> &channels, const std::filesystem::path &path);
std::vector<KSpace> read_complex(const std::filesystem::path &path);

} // namespace fcs::harness
