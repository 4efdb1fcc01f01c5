#pragma once

#include <string>
#include <vector>

#include "shelf/occupancy.hpp"
#include "shelf/simulator.hpp"

namespace shelf {

struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;  // row-major, top row first
};

/// Grayscale PFM ("Pf", little-endian scale -1, rows stored bottom-up).
void write_pfm(const std::string& path, const FloatImage& img);
FloatImage read_pfm(const std::string& path);

/// 8-bit binary PGM with finite values min-max normalized; non-finite -> 0.
void write_pgm(const std::string& path, const FloatImage& img);

FloatImage depth_image(const DepthRaster& r);

/// Overhead view: shelf floor, occluder footprints, the floor visibility
/// polygon, hidden-placement cells and the target if present.
std::string overhead_svg(const Scene& scene, const SimplePolygon& visible, const HiddenPlacementSet& hidden);

}  // namespace shelf
