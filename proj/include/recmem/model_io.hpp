#pragma once

#include <filesystem>

#include "recmem/bprmf.hpp"
#include "recmem/ease.hpp"

namespace recmem {

// Versioned binary container: magic "RMDL", u32 version, u32 model kind,
// dims, then the row-major payload as little-endian doubles.

void save_bprmf(const std::filesystem::path& path, const BprmfModel& model);
BprmfModel load_bprmf(const std::filesystem::path& path);

void save_ease(const std::filesystem::path& path, const EaseModel& model);
// EASE scoring needs the training matrix the weights were solved against.
EaseModel load_ease(const std::filesystem::path& path, const InteractionMatrix& train);

}  // namespace recmem
