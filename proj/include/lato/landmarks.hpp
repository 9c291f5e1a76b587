// Copyright 2026 The lato Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LATO_LANDMARKS_HPP_
#define LATO_LANDMARKS_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace lato {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Canvas {
  int width = 512;
  int height = 512;

  friend bool operator==(const Canvas&, const Canvas&) = default;
};

// Inclusive index range into the 68-point scheme.
struct IndexRange {
  int first;
  int last;

  constexpr int size() const { return last - first + 1; }
  constexpr bool contains(int i) const { return i >= first && i <= last; }
};

namespace regions {
inline constexpr IndexRange kJaw{0, 16};
inline constexpr IndexRange kBrows{17, 26};
inline constexpr IndexRange kNose{27, 35};
inline constexpr IndexRange kNoseBridge{27, 30};
inline constexpr IndexRange kLeftEye{36, 41};
inline constexpr IndexRange kRightEye{42, 47};
inline constexpr IndexRange kEyes{36, 47};
inline constexpr IndexRange kMouth{48, 67};
// Eyes and mouth; the brows are not part of the inner set.
inline constexpr IndexRange kInner{36, 67};
}  // namespace regions

// 68 named 2D points on a W x H pixel canvas. Immutable once built; every
// coordinate is finite.
class LandmarkSet {
 public:
  static constexpr std::size_t kNumPoints = 68;
  using Points = std::array<Point, kNumPoints>;

  LandmarkSet() = default;
  // Throws Error(kRange) on a non-finite coordinate or a non-positive canvas.
  explicit LandmarkSet(const Points& points, Canvas canvas = {});

  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point, kNumPoints> points() const { return points_; }
  const Canvas& canvas() const { return canvas_; }

  Point Centroid() const;
  // Mean of the points in [range.first, range.last].
  Point Mean(IndexRange range) const;

  // Coordinates clamped into [0, width - 1] x [0, height - 1].
  LandmarkSet Clamped() const;
  LandmarkSet Translated(double dx, double dy) const;
  bool InsideCanvas() const;

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;

 private:
  Points points_{};
  Canvas canvas_{};
};

// Region-grouped landmark JSON: {"JAW/BROWS": [[X, Y], ...] (27), "NOSE" (9),
// "EYES" (12), "MOUTH" (20)}. Throws Error(kSchema) naming the region at fault.
LandmarkSet ParseLandmarks(std::string_view json_text, Canvas canvas = {});
// Emits the same layout; integral coordinates are written without a fraction
// so integer documents round-trip byte for byte.
std::string SerializeLandmarks(const LandmarkSet& landmarks);

LandmarkSet ReadLandmarksFile(const std::string& path, Canvas canvas = {});
void WriteLandmarksFile(const std::string& path, const LandmarkSet& landmarks);

// Distance between the mean of points 36-41 and the mean of points 42-47.
// Throws Error(kDegenerate) when the eye centres coincide.
double InterocularDistance(const LandmarkSet& f);

struct ChangeScore {
  double inner_diff = 0.0;    // mean |a - b| over the 64 inner coordinates
  double overall_diff = 0.0;  // mean |a - b| over all 136 coordinates
  double score = 0.0;         // 0.7 * inner + 0.3 * overall, pixels
};

// Throws Error(kUnit) when the canvases differ.
ChangeScore ComputeChangeScore(const LandmarkSet& a, const LandmarkSet& b);
// ComputeChangeScore(a, b).score divided by InterocularDistance(a).
double NormalizedChangeScore(const LandmarkSet& a, const LandmarkSet& b);

// Mean absolute coordinate difference over all 136 coordinates, pixels.
double LandmarkL1Error(const LandmarkSet& pred, const LandmarkSet& target);

}  // namespace lato

#endif  // LATO_LANDMARKS_HPP_
