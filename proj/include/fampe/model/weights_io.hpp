#pragma once

// FAMW weight files, little-endian, no padding:
//   "FAMW" | u32 version = 1 | u32 tensor count |
//   per tensor: u32 ndim | u32 dims[ndim] | f64 payload[prod(dims)]

#include <filesystem>
#include <string>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/io/binary.hpp"
#include "fampe/io/files.hpp"
#include "fampe/model/model.hpp"

namespace fampe::model {

inline constexpr std::uint32_t weights_format_version = 1;

inline std::vector<unsigned char> encode_weights(const std::vector<Tensor>& tensors) {
  io::ByteWriter w;
  w.bytes("FAMW", 4);
  w.u32(weights_format_version);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : t.values()) w.f64(v);
  }
  return w.buffer();
}

inline std::vector<Tensor> decode_weights(const std::vector<unsigned char>& bytes) {
  io::ByteReader r(bytes, "weights");
  if (!r.match("FAMW", 4)) throw Error(errc::format, "weights: bad magic, not a FAMW file");
  if (const auto version = r.u32(); version != weights_format_version) {
    throw Error(errc::format, "weights: unsupported format version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  // Walk the headers first so a truncated file is reported with the full size
  // it claims before any payload is copied.
  std::vector<Shape> shapes;
  std::size_t expected = r.position();
  {
    io::ByteReader probe(bytes, "weights");
    probe.match("FAMW", 4);
    probe.u32();
    probe.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t ndim = probe.u32();
      if (ndim == 0 || ndim > 8) throw Error(errc::format, "weights: tensor " + std::to_string(i) + " has invalid rank " + std::to_string(ndim));
      Shape s;
      for (std::uint32_t d = 0; d < ndim; ++d) {
        const auto extent = probe.u32();
        if (extent == 0) throw Error(errc::format, "weights: tensor " + std::to_string(i) + " has a zero extent");
        s.push_back(extent);
      }
      const std::size_t payload = shape_size(s) * 8;
      expected = probe.position() + payload;
      if (expected > bytes.size()) {
        throw Error(errc::format, "weights: truncated file, expected " + std::to_string(expected) + " bytes, got " +
                                      std::to_string(bytes.size()));
      }
      probe.require(payload);
      for (std::size_t k = 0; k < payload; ++k) probe.u8();
      shapes.push_back(std::move(s));
    }
    if (probe.remaining() != 0) {
      throw Error(errc::format, "weights: expected " + std::to_string(probe.position()) + " bytes, got " +
                                    std::to_string(bytes.size()) + " (trailing data)");
    }
  }
  std::vector<Tensor> tensors;
  tensors.reserve(count);
  for (const auto& s : shapes) {
    r.u32();
    for (std::size_t d = 0; d < s.size(); ++d) r.u32();
    Tensor t(s);
    for (double& v : t.storage()) v = r.f64();
    tensors.push_back(std::move(t));
  }
  return tensors;
}

inline void save_weights(const Model& m, const std::filesystem::path& path) {
  io::write_atomic(path, encode_weights(m.parameters()));
}

/// Loads weights and checks them against `spec`.
inline Model load_weights(const ModelSpec& spec, const std::filesystem::path& path) {
  return Model(spec, decode_weights(io::read_bytes(path)));
}

} // namespace fampe::model
