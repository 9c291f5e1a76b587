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

#include "lato/posenc.hpp"

#include <algorithm>
#include <cmath>

#include "lato/error.hpp"

namespace lato::posenc {
namespace {

void RotateBand(double* band, int dim, std::int64_t pos, double base) {
  if (pos == 0) return;
  for (int j = 0; j < dim / 2; ++j) {
    const double theta = static_cast<double>(pos) * std::pow(base, -2.0 * j / dim);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double a = band[2 * j];
    const double b = band[2 * j + 1];
    band[2 * j] = a * c - b * s;
    band[2 * j + 1] = a * s + b * c;
  }
}

std::int64_t Cell(double v, int stride, int cells) {
  const auto c = static_cast<std::int64_t>(std::floor(v / stride));
  return std::clamp<std::int64_t>(c, 0, cells - 1);
}

}  // namespace

void RopeLayout::Validate() const {
  for (int dim : {d_t, d_h, d_w}) {
    if (dim < 2 || dim % 2 != 0) {
      throw Error(ErrorKind::kConfig, "rotary sub-dimensions must be even and positive, got (" +
                                          std::to_string(d_t) + ", " + std::to_string(d_h) +
                                          ", " + std::to_string(d_w) + ")");
    }
  }
  if (!(base > 1.0) || !std::isfinite(base)) {
    throw Error(ErrorKind::kConfig, "rotary base must be finite and greater than 1");
  }
}

RopeLayout RopeLayout::ForHeadDim(int head_dim, double base) {
  if (head_dim < 6 || head_dim % 2 != 0) {
    throw Error(ErrorKind::kConfig, "head_dim must be even and at least 6");
  }
  RopeLayout layout;
  layout.base = base;
  layout.d_t = std::max(2, (head_dim / 4) / 2 * 2);
  const int rest = head_dim - layout.d_t;
  layout.d_h = rest / 2 / 2 * 2;
  layout.d_w = rest - layout.d_h;
  if (layout.d_w % 2 != 0 || layout.d_h < 2) {
    throw Error(ErrorKind::kConfig, "cannot split head_dim " + std::to_string(head_dim));
  }
  return layout;
}

std::vector<PositionTriple> ImagePositions(int grid_h, int grid_w, GridOrder order) {
  if (grid_h < 1 || grid_w < 1) throw Error(ErrorKind::kConfig, "grid dimensions must be >= 1");
  const std::int64_t n = static_cast<std::int64_t>(grid_h) * grid_w;
  std::vector<PositionTriple> out(n);
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = order == GridOrder::kRowMajor ? PositionTriple{0, i / grid_w, i % grid_w}
                                           : PositionTriple{0, i % grid_h, i / grid_h};
  }
  return out;
}

std::vector<PositionTriple> TextPositions(int count) {
  std::vector<PositionTriple> out(std::max(count, 0));
  for (int i = 0; i < count; ++i) out[i] = {i, 0, 0};
  return out;
}

std::vector<PositionTriple> LandmarkPositions(const LandmarkSet& f, int stride) {
  if (stride <= 0) throw Error(ErrorKind::kConfig, "stride must be positive");
  const int rows = (f.canvas().height + stride - 1) / stride;
  const int cols = (f.canvas().width + stride - 1) / stride;
  std::vector<PositionTriple> out;
  out.reserve(LandmarkSet::kNumPoints);
  for (const Point& p : f.points()) out.push_back({0, Cell(p.y, stride, rows), Cell(p.x, stride, cols)});
  return out;
}

void ApplyRopeInPlace(std::span<double> vec, const PositionTriple& p, const RopeLayout& layout) {
  layout.Validate();
  if (vec.size() != static_cast<std::size_t>(layout.head_dim())) {
    throw Error(ErrorKind::kShape, "vector length " + std::to_string(vec.size()) +
                                       " does not match head_dim " +
                                       std::to_string(layout.head_dim()));
  }
  RotateBand(vec.data(), layout.d_t, p.t, layout.base);
  RotateBand(vec.data() + layout.d_t, layout.d_h, p.h, layout.base);
  RotateBand(vec.data() + layout.d_t + layout.d_h, layout.d_w, p.w, layout.base);
}

std::vector<double> ApplyRope(std::span<const double> vec, const PositionTriple& p,
                              const RopeLayout& layout) {
  std::vector<double> out(vec.begin(), vec.end());
  ApplyRopeInPlace(out, p, layout);
  return out;
}

nlohmann::json ToJson(const PositionTriple& p) { return {p.t, p.h, p.w}; }

nlohmann::json ToJson(std::span<const PositionTriple> ps) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : ps) out.push_back(ToJson(p));
  return out;
}

}  // namespace lato::posenc
