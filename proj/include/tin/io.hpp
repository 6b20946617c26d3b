#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "tin/loss.hpp"
#include "tin/model.hpp"
#include "tin/trainer.hpp"
#include "tin/types.hpp"

namespace tin {

namespace fs = std::filesystem;

struct ManifestEntry {
  fs::path image;
  fs::path gt;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

/// Parses `image_path<TAB>gt_path` lines; blank lines and lines starting
/// with '#' are skipped. Relative paths are resolved against `base_dir`.
Manifest parse_manifest(std::istream& in, const fs::path& base_dir = {});
/// Paths are relative to the manifest's directory.
Manifest load_manifest(const fs::path& path);

/// 8-bit raster with interleaved channels.
struct RawImage {
  Index height = 0;
  Index width = 0;
  Index channels = 0;
  std::vector<std::uint8_t> pixels;
};

/// Reads an 8-bit PNG as gray (channels = 1) or RGB (channels = 3).
/// 16-bit files are rejected with DataError.
RawImage read_png(const fs::path& path);
void write_png(const fs::path& path, const RawImage& image);
/// Binary (P5) 8-bit PGM.
RawImage read_pgm(const fs::path& path);

/// [1,3,H,W] tensor scaled by 1/255; gray files are replicated to RGB.
Tensor<float> load_image(const fs::path& path);
/// Single-channel PNG or PGM kept as raw 0..255 labels.
GroundTruth load_gt(const fs::path& path);

void save_image(const fs::path& path, const Tensor<float>& image);
void save_gt(const fs::path& path, const GroundTruth& gt);
/// 8-bit gray PNG with value round(255 * p).
void save_edge_map(const fs::path& path, const EdgeMap& map);
EdgeMap load_edge_map(const fs::path& path);

/// Loads every manifest entry; image/label size mismatches raise DataError.
std::vector<Sample> load_dataset(const Manifest& manifest);

/// "TINCKPT1", u32 variant tag, then per tensor: u32 name length, name,
/// u32 rank, u32 dims, little-endian f32 data; finally CRC32 of all
/// preceding bytes.
template <typename Scalar>
std::vector<std::uint8_t> encode_checkpoint(const NetworkGraph<Scalar>& graph);
NetworkGraph<float> decode_checkpoint(std::span<const std::uint8_t> bytes);

template <typename Scalar>
void save_checkpoint(const NetworkGraph<Scalar>& graph, const fs::path& path);
NetworkGraph<float> load_checkpoint(const fs::path& path);

/// Applies `key=value` lines to the training and loss settings. Unknown
/// keys and malformed values raise DataError naming the line.
void apply_config(std::istream& in, TrainConfig& train, LossConfig& loss);
void load_config(const fs::path& path, TrainConfig& train, LossConfig& loss);
/// TIN_SEED, when set, replaces the configured seed.
void apply_env_overrides(TrainConfig& train);

}  // namespace tin
