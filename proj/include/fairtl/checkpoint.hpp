#pragma once

#include <filesystem>

#include "fairtl/gan.hpp"

namespace fairtl {

/// Versioned binary checkpoint. Layout (all integers and doubles
/// little-endian, doubles as raw IEEE-754 bits so round trips are
/// bit-exact):
///
///   magic   "FTLCKPT\n"            8 bytes
///   u32     format version (1)
///   u8      stage, u8 has_source_disc, u8 has_opt, u8 zero
///   u64     config_hash
///   u64     seed
///   u64     payload_bytes          length of everything after this field
///   payload:
///     generator, discriminator, [source discriminator]   (MlpParams)
///     [optimizer moments]                                (AdamState x2)
///   u64     fnv1a64 of payload
///
/// MlpParams: u32 layer count L+1 as dims; u64 dims[]; per layer u8
/// activation tag + f64 leaky slope; then per layer weights row-major + bias.
struct CheckpointMeta {
    std::uint32_t version = 1;
    Stage stage = Stage::Pretrained;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

void save_checkpoint(const GanState& state, const std::filesystem::path& path,
                     const CheckpointMeta& meta);

GanState load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta_out = nullptr);

}  // namespace fairtl
