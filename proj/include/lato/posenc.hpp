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

#ifndef LATO_POSENC_HPP_
#define LATO_POSENC_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "lato/landmarks.hpp"

namespace lato::posenc {

// (text axis, grid row, grid column). Token positions are non-negative;
// ApplyRope also accepts signed offsets so relative and inverse rotations
// can be expressed.
struct PositionTriple {
  std::int64_t t = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;

  friend bool operator==(const PositionTriple&, const PositionTriple&) = default;
  friend PositionTriple operator-(const PositionTriple& a, const PositionTriple& b) {
    return {a.t - b.t, a.h - b.h, a.w - b.w};
  }
};

enum class GridOrder {
  kRowMajor,     // token i -> (0, i / grid_w, i % grid_w)
  kColumnMajor,  // token i -> (0, i % grid_h, i / grid_h)
};

struct RopeLayout {
  int d_t = 16;
  int d_h = 24;
  int d_w = 24;
  double base = 10000.0;

  int head_dim() const { return d_t + d_h + d_w; }
  // Throws Error(kConfig) unless every sub-dimension is even and positive
  // and base > 1.
  void Validate() const;
  // Default split for a head dimension: a quarter (rounded to even) on the
  // text axis, the remainder halved over rows and columns.
  static RopeLayout ForHeadDim(int head_dim, double base = 10000.0);
};

// Throws Error(kConfig) when either dimension is < 1.
std::vector<PositionTriple> ImagePositions(int grid_h, int grid_w,
                                           GridOrder order = GridOrder::kRowMajor);
// (i, 0, 0) for i in [0, count).
std::vector<PositionTriple> TextPositions(int count);
// (0, floor(Y / stride), floor(X / stride)) clamped into the grid covering
// the landmark canvas. Throws Error(kConfig) on a non-positive stride.
std::vector<PositionTriple> LandmarkPositions(const LandmarkSet& f, int stride = 16);

// Rotates each adjacent pair (2j, 2j + 1) of an axis sub-band by
// pos * base^(-2j / d_axis). Throws Error(kShape) on a length mismatch.
void ApplyRopeInPlace(std::span<double> vec, const PositionTriple& p, const RopeLayout& layout);
std::vector<double> ApplyRope(std::span<const double> vec, const PositionTriple& p,
                              const RopeLayout& layout);

nlohmann::json ToJson(const PositionTriple& p);
nlohmann::json ToJson(std::span<const PositionTriple> ps);

}  // namespace lato::posenc

#endif  // LATO_POSENC_HPP_
