#pragma once

// FAMA attribution files, little-endian:
//   "FAMA" | u32 version = 1 | u32 C | u32 H | u32 W | f64 payload[C*H*W] |
//   u8 aggregation (0 = sum, 1 = abs-sum)
// The text export has one "c h w value" line per entry.

#include <filesystem>
#include <string>

#include "fampe/attribution/config.hpp"
#include "fampe/evaluation/report.hpp"
#include "fampe/io/binary.hpp"
#include "fampe/io/files.hpp"

namespace fampe {

inline constexpr std::uint32_t map_format_version = 1;

inline std::vector<unsigned char> encode_map(const AttributionMap& map) {
  require_chw(map.values, "encode_map");
  io::ByteWriter w;
  w.bytes("FAMA", 4);
  w.u32(map_format_version);
  for (std::size_t d = 0; d < 3; ++d) w.u32(static_cast<std::uint32_t>(map.values.dim(d)));
  for (double v : map.values.values()) w.f64(v);
  w.u8(static_cast<std::uint8_t>(map.channel_aggregation));
  return w.buffer();
}

inline AttributionMap decode_map(const std::vector<unsigned char>& bytes) {
  io::ByteReader r(bytes, "attribution map");
  if (!r.match("FAMA", 4)) throw Error(errc::format, "attribution map: bad magic, not a FAMA file");
  if (const auto v = r.u32(); v != map_format_version) {
    throw Error(errc::format, "attribution map: unsupported version " + std::to_string(v));
  }
  const std::size_t C = r.u32(), H = r.u32(), W = r.u32();
  if (C == 0 || H == 0 || W == 0) throw Error(errc::format, "attribution map: zero extent");
  const std::size_t expected = r.position() + C * H * W * 8 + 1;
  if (bytes.size() != expected) {
    throw Error(errc::format, "attribution map: expected " + std::to_string(expected) + " bytes, got " + std::to_string(bytes.size()));
  }
  Tensor values({C, H, W});
  for (double& v : values.storage()) v = r.f64();
  const auto agg = r.u8();
  if (agg > 1) throw Error(errc::format, "attribution map: unknown aggregation byte " + std::to_string(agg));
  return AttributionMap{std::move(values), static_cast<Aggregation>(agg)};
}

inline void save_map(const AttributionMap& map, const std::filesystem::path& path) { io::write_atomic(path, encode_map(map)); }

inline AttributionMap load_map(const std::filesystem::path& path) { return decode_map(io::read_bytes(path)); }

inline std::string map_text(const AttributionMap& map) {
  require_chw(map.values, "map_text");
  std::string out;
  for (std::size_t c = 0; c < map.values.dim(0); ++c) {
    for (std::size_t h = 0; h < map.values.dim(1); ++h) {
      for (std::size_t w = 0; w < map.values.dim(2); ++w) {
        out += std::to_string(c) + " " + std::to_string(h) + " " + std::to_string(w) + " " +
               evaluation::format_number(map.values.at(c, h, w)) + "\n";
      }
    }
  }
  return out;
}

} // namespace fampe
