#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "taxai/bmfac/mlp.hpp"

namespace taxai::bmfac {

/// Binary layout, all integers and floats little-endian:
///   "TXCK" magic, u32 version, u32 network count, then per network
///   u32 name length, name bytes, u8 activation, u32 dim count, u32 dims,
///   and for each layer W (row-major, out x in) followed by b as f64.
inline constexpr std::uint32_t kCheckpointVersion = 1;

using NamedNetwork = std::pair<std::string, Mlp>;

void write_checkpoint(std::ostream& out, const std::vector<NamedNetwork>& networks);
[[nodiscard]] std::vector<NamedNetwork> read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedNetwork>& networks);
[[nodiscard]] std::vector<NamedNetwork> load_checkpoint(const std::filesystem::path& path);

}  // namespace taxai::bmfac
