#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fcs/sampling.hpp"

// Masks on disk: a binary P4 PBM of the boolean grid (row x = first index,
// 1 = sampled) plus a sidecar of `key = value` lines carrying provenance.
namespace fcs::sampling {

void write_pbm(std::ostream &out, const MaskGrid &mask);
MaskGrid read_pbm(std::istream &in);

std::string sidecar_text(const SamplingMask &mask);

/// Writes <stem>.pbm and <stem>.meta.
void save_mask(const SamplingMask &mask, const std::filesystem::path &stem);
SamplingMask load_mask(const std::filesystem::path &stem);

} // namespace fcs::sampling
