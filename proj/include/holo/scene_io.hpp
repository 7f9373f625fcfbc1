#pragma once

#include <string>

#include "holo/scene.hpp"

namespace holo {

// HOLOSCENE1 container: 10 byte magic, u32 JSON header length, JSON header
// {"N":..., "L":..., "units": {...}}, then the seven parameter arrays as
// f64 little endian in declared field order: positions, rotations,
// log scales, amplitudes, opacity logits, phases, plane logits.
void write_scene(const std::string& path, const GaussianScene& s);
GaussianScene read_scene(const std::string& path);

}  // namespace holo
