#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pinch/neural/cnn.hpp"

namespace pinch {

// Binary model layout (all integers and floats little-endian):
//   "PCNN" | u16 version | u16 trained_K
//   10 parameter blocks in CnnParams::blocks() order, each
//       u32 rank | rank x u32 dims | prod(dims) x f64
//   norm block  [4]  mean_re, std_re, mean_im, std_im
//   dropout block [1]
//   u32 CRC-32 of every preceding byte
std::vector<std::uint8_t> serialize_model(const nn::CnnModel& model);

// Throws CorruptArtifact on bad magic, version, shape, length or checksum.
nn::CnnModel deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const nn::CnnModel& model, const std::filesystem::path& path);
nn::CnnModel load_model(const std::filesystem::path& path);

} // namespace pinch
