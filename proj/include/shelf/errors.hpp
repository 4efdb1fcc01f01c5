#pragma once

#include <stdexcept>
#include <string>

namespace shelf {

struct ShelfError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ViewpointInsideObstacle : ShelfError {
  ViewpointInsideObstacle() : ShelfError("viewpoint lies inside an obstacle") {}
};

struct GenerationFailed : ShelfError {
  using ShelfError::ShelfError;
};

struct NoHiddenPlacement : ShelfError {
  NoHiddenPlacement() : ShelfError("scene cannot fully occlude the target") {}
};

struct LengthMismatch : ShelfError {
  LengthMismatch() : ShelfError("distribution lengths differ") {}
};

struct InfeasibleAction : ShelfError {
  using ShelfError::ShelfError;
};

struct NoFeasibleAction : ShelfError {
  NoFeasibleAction() : ShelfError("no feasible action") {}
};

}  // namespace shelf
