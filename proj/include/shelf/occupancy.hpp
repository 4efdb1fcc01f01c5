#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shelf/exec.hpp"
#include "shelf/scene.hpp"

namespace shelf {

/// Candidate target-center positions: cell centers of a regular grid.
struct PlacementGrid {
  double x_min = 0.0;
  double x_max = 0.6;
  double z_min = 0.0;
  double z_max = 0.6;
  double spacing = 0.01;

  static PlacementGrid for_shelf(const ShelfConfig& shelf, double spacing = 0.01);

  int nx() const;
  int nz() const;
  int cell_count() const { return nx() * nz(); }
  Point2 center(int index) const;

  friend bool operator==(const PlacementGrid&, const PlacementGrid&) = default;
};

struct HiddenPlacementSet {
  PlacementGrid grid;
  std::vector<int> hidden;  // ascending cell indices

  bool empty() const { return hidden.empty(); }
  friend bool operator==(const HiddenPlacementSet&, const HiddenPlacementSet&) = default;
};

/// Which reflected shape inflates the visible region before ray casting.
enum class Prefilter {
  /// Union of visible-region translates by each reflected base sample point.
  /// Rejects exactly the placements where some base sample point is seen in
  /// 2D, so the result matches the exhaustive ray cast cell for cell.
  BaseSamples,
  /// Visible region (+) reflected footprint hull. Rejects any placement whose
  /// footprint touches the visible region; may drop a few point-hidden cells.
  FootprintHull,
};

/// Target centers that are collision-free and fully occluded. Pipeline:
/// 2D visibility polygon -> Minkowski inflation -> candidate
/// complement -> 3D ray-cast refinement of candidates only.
HiddenPlacementSet hidden_placements(const Scene& scene, const TargetSpec& target, const PlacementGrid& grid,
                                     Exec exec = Exec::Parallel, Prefilter prefilter = Prefilter::BaseSamples);

/// Reference: ray-cast every sample point at every collision-free cell.
HiddenPlacementSet hidden_placements_exhaustive(const Scene& scene, const TargetSpec& target,
                                                const PlacementGrid& grid, Exec exec = Exec::Parallel);

/// Is a target centered at `c` inside the floor and clear of every occluder?
bool placement_collision_free(const Scene& scene, const TargetSpec& target, Point2 c);

/// Visibility polygon of the floor seen from the camera's floor projection.
SimplePolygon floor_visibility(const Scene& scene);

struct OccupancyDist2D {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

inline constexpr double kSupportEps = 1e-12;

struct OccupancyDist1D {
  std::vector<double> values;
  int support = 0;

  static OccupancyDist1D from_values(std::vector<double> v);
  friend bool operator==(const OccupancyDist1D&, const OccupancyDist1D&) = default;
};

std::pair<OccupancyDist2D, OccupancyDist1D> distribution_from_placements(const Scene& scene,
                                                                         const TargetSpec& target,
                                                                         const HiddenPlacementSet& hps);

/// The 1D half of distribution_from_placements without the image raster.
OccupancyDist1D column_distribution(const Scene& scene, const TargetSpec& target, const HiddenPlacementSet& hps);

/// Pointwise min without renormalization. An empty `previous` marks t = 0
/// and returns `current` unchanged. Throws LengthMismatch.
OccupancyDist1D history_min(const OccupancyDist1D& current, const OccupancyDist1D& previous);

int support(const OccupancyDist1D& d);
double entropy(const OccupancyDist1D& d);
OccupancyDist1D normalized(const OccupancyDist1D& d);

/// Ground-truth perception: the exact pipeline on the occluders only. When the
/// scene has a target and some of its sample points are visible, the result is
/// instead the column distribution of its still-occluded points.
OccupancyDist1D perceive(const Scene& scene, const TargetSpec& target, const PlacementGrid& grid,
                         Exec exec = Exec::Serial);

std::string distribution_to_json(const OccupancyDist1D& d);
OccupancyDist1D distribution_from_json(const std::string& text);

}  // namespace shelf
