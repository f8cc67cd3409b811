#pragma once

#include <filesystem>

#include "spoofguard/network.hpp"

namespace spoofguard {

// "SGW1" weight file: magic, u32 version, u32 tensor count, then per
// tensor u16 name length + name, u8 rank, u32 dims, little-endian f32
// data; a u32 CRC32 of all preceding bytes closes the file. The network
// configuration rides along as reserved meta/* tensors, so a file is
// self-describing. Round-trips preserve every parameter bit.

void save_weights(Network<float>& net, const std::filesystem::path& path);

// Rebuilds the network recorded in the file.
Network<float> load_network(const std::filesystem::path& path);

// Loads into an existing network; a tensor whose shape disagrees with the
// model is reported by name.
void load_into(Network<float>& net, const std::filesystem::path& path);

}  // namespace spoofguard
