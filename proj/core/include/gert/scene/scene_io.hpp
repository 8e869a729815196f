// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/scene/scene.hpp"

#include <filesystem>

namespace gert::scene {

/// Write `scene.toml` (objects, materials, origin, frequency) plus one
/// binary little-endian PLY per mesh into `dir` (created if needed).
/// import_scene(export_scene(s)) reproduces s bit-exactly.
void export_scene(const Scene& s, const std::filesystem::path& dir);

/// Inverse of export_scene. Throws IoError naming any missing file and
/// ParseError on manifest/mesh mismatches or malformed data.
Scene import_scene(const std::filesystem::path& dir);

} // namespace gert::scene
