#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seedlab/nn/tensor.hpp"

namespace seedlab::nn {

// Binary checkpoint, all integers and doubles little-endian:
//   magic "SLCK" | u32 version (1) | u32 count
//   per tensor: u32 name_len | name bytes | u32 rank | u64 dims[rank] | f64 values[prod(dims)]
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor value;
};

void write_checkpoint(const std::filesystem::path& path, std::span<const Parameter* const> params);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

// Copies values by name; throws InvalidInput on a missing name or shape mismatch.
void load_checkpoint_into(const std::vector<NamedTensor>& tensors,
                          std::span<Parameter* const> params);

}  // namespace seedlab::nn
