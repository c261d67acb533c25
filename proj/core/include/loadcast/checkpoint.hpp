#pragma once

#include <cstdint>
#include <string>

#include "loadcast/dataio.hpp"
#include "loadcast/model.hpp"
#include "loadcast/training.hpp"

namespace loadcast::ckpt {

/// Bumped whenever the envelope layout changes; older readers must refuse
/// newer files instead of guessing.
inline constexpr int k_format_version = 1;

/// A checkpoint is a JSON envelope:
///   format_version, seed, architecture, hyperparams,
///   normalization {columns, min, max},
///   tensors: { "<stable path>": {"shape": [...], "data": "<base64>"} }
/// Tensor payloads are the row-major values as 8-byte little-endian IEEE-754
/// doubles, base64 encoded. Serialization is deterministic, so
/// save -> load -> save reproduces the file byte for byte.
struct LoadedCheckpoint {
    model::Model model;
    train::HyperParams hyperparams;
    data::NormStats stats;
    std::uint64_t seed = 0;
};

std::string serialize(const model::Model& m, const train::HyperParams& hp,
                      const data::NormStats& stats, std::uint64_t seed);

/// Rebuilds the model from the envelope. Unsupported format_version raises a
/// version error; a tensor whose shape disagrees with the architecture raises
/// a shape error; everything else malformed (bad JSON, missing or stray keys,
/// undecodable payloads) raises a corrupt error.
LoadedCheckpoint deserialize(const std::string& text);

void save_checkpoint(const std::string& path, const model::Model& m,
                     const train::HyperParams& hp, const data::NormStats& stats,
                     std::uint64_t seed);

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace loadcast::ckpt
