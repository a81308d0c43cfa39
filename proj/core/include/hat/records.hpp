#pragma once

#include <cstdint>

namespace hat {

using FrameIndex = std::int64_t;

/// Pixel box as (left, top, width, height).
struct Box {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Box&, const Box&) = default;
};

/// One (frame, identity, box) observation of a finished or ground-truth track.
struct TrackRecord {
  FrameIndex frame = 0;
  std::int64_t id = 0;
  Box box;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

}  // namespace hat
