#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shelf/occupancy.hpp"
#include "shelf/scene.hpp"

namespace shelf {

struct GenerationConfig {
  int n_objects = 6;
  double min_extent = 0.06;
  double max_extent = 0.20;
  double cylinder_probability = 0.5;
  int max_attempts = 1000;
  ShelfConfig shelf;
  int image_width = 256;
  int image_height = 192;
};

/// Rejection-samples non-colliding occluders. Deterministic in (cfg, seed).
/// Objects that cannot be placed within cfg.max_attempts are dropped with a
/// warning. Throws GenerationFailed when fewer than two objects fit.
Scene sample_scene(const GenerationConfig& cfg, std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

/// Draws the target center uniformly from the hidden-placement set.
/// Throws NoHiddenPlacement when that set is empty.
Scene place_target_hidden(const Scene& scene, const TargetSpec& target, std::uint64_t seed,
                          const PlacementGrid& grid);
Scene place_target_hidden(const Scene& scene, const TargetSpec& target, std::uint64_t seed);

/// Deterministic 64-bit mix of a seed with extra keys (splitmix64 chain).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace shelf
