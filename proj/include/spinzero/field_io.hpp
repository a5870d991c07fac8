#pragma once

// Binary spinor-field files plus a JSON sidecar; layout in docs/formats.md.

#include <filesystem>

#include <json.hpp>

#include "spinzero/torus.hpp"

namespace spinzero {

nlohmann::json geometry_json(const TorusSpinGeometry& geom);

/// Writes `path` (binary) and `path` + ".json" (sidecar). Throws std::runtime_error on I/O failure.
void write_field(const SpinorField& psi, const std::filesystem::path& path);

/// Reads a binary field file and rebuilds its geometry from the header.
/// Throws std::runtime_error on truncated or malformed input.
SpinorField read_field(const std::filesystem::path& path);

}  // namespace spinzero
