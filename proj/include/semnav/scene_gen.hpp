#pragma once

#include <cstdint>

#include "semnav/scene.hpp"

namespace semnav {

struct SceneGenParams {
    int min_size = 11;            // outer dimension, walls included
    int max_size = 13;
    int min_objects = 0;          // 0 means "room pool size"
    int max_objects = 0;          // 0 means "room pool size" (each category once)
    double obstacle_fraction = 0.10;  // share of interior cells turned to wall
    int satellite_radius = 2;     // Chebyshev radius for prior-linked placement
    int max_attempts = 64;
};

// Procedural room: bordered grid with random interior wall segments, objects
// from the room's category pool placed anchor-first, prior-linked categories
// landing near an already-placed partner. The free region is connected.
Scene generate_scene(RoomType room_type, const SceneGenParams& params, const Vocabulary& vocab,
                     const CooccurrencePrior& prior, std::uint64_t seed,
                     const std::string& scene_id = "");

}  // namespace semnav
