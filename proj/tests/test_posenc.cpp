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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lato/error.hpp"
#include "lato/posenc.hpp"
#include "support.hpp"

namespace lato::posenc {
namespace {

// Adjacent-pair rotation per axis, written out independently.
std::vector<double> RopeOracle(const std::vector<double>& v, const PositionTriple& p, const RopeLayout& l) {
  std::vector<double> out = v;
  const int dims[3] = {l.d_t, l.d_h, l.d_w};
  const double pos[3] = {static_cast<double>(p.t), static_cast<double>(p.h), static_cast<double>(p.w)};
  int start = 0;
  for (int a = 0; a < 3; ++a) {
    for (int j = 0; j < dims[a] / 2; ++j) {
      const double theta = pos[a] * std::pow(l.base, -2.0 * j / dims[a]);
      const double x = v[start + 2 * j], y = v[start + 2 * j + 1];
      out[start + 2 * j] = x * std::cos(theta) - y * std::sin(theta);
      out[start + 2 * j + 1] = x * std::sin(theta) + y * std::cos(theta);
    }
    start += dims[a];
  }
  return out;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(const std::vector<double>& a) { return std::sqrt(Dot(a, a)); }

struct Draws {
  std::mt19937_64 rng{99};
  std::vector<double> Vec(int n) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
  }
  PositionTriple Pos() {
    std::uniform_int_distribution<int> u(0, 1023);
    return {u(rng), u(rng) % 64, u(rng) % 64};
  }
};

TEST(ImagePositions, RowMajorIndexArithmetic) {
  const auto p = ImagePositions(32, 32);
  ASSERT_EQ(p.size(), 1024u);
  EXPECT_EQ(p[0], (PositionTriple{0, 0, 0}));
  EXPECT_EQ(p[33], (PositionTriple{0, 1, 1}));
  EXPECT_EQ(p[1023], (PositionTriple{0, 31, 31}));
}

TEST(ImagePositions, NonSquareGridsInBothOrders) {
  const auto row = ImagePositions(2, 3, GridOrder::kRowMajor);
  const auto col = ImagePositions(2, 3, GridOrder::kColumnMajor);
  EXPECT_EQ(row[4], (PositionTriple{0, 1, 1}));
  EXPECT_EQ(row[2], (PositionTriple{0, 0, 2}));
  EXPECT_EQ(col[2], (PositionTriple{0, 0, 1}));
  EXPECT_EQ(col[5], (PositionTriple{0, 1, 2}));
  EXPECT_EQ(ImagePositions(32, 32, GridOrder::kColumnMajor)[33], (PositionTriple{0, 1, 1}));
  EXPECT_THROW(ImagePositions(0, 4), Error);
}

TEST(TextPositions, IndexOnTextAxis) {
  const auto p = TextPositions(77);
  ASSERT_EQ(p.size(), 77u);
  for (int i = 0; i < 77; ++i) EXPECT_EQ(p[i], (PositionTriple{i, 0, 0}));
}

TEST(LandmarkPositions, FloorArithmetic) {
  const auto p = LandmarkPositions(testing::SampleSource(), 16);
  EXPECT_EQ(p[0], (PositionTriple{0, 12, 10}));
  LandmarkSet::Points pts{};
  pts[1] = {511, 511};
  const auto q = LandmarkPositions(LandmarkSet(pts), 16);
  EXPECT_EQ(q[0], (PositionTriple{0, 0, 0}));
  EXPECT_EQ(q[1], (PositionTriple{0, 31, 31}));
  for (int stride : {0, -16}) {
    try {
      LandmarkPositions(LandmarkSet(pts), stride);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  }
}

TEST(LandmarkPositions, EveryPixelMapsToItsImageToken) {
  const auto grid = ImagePositions(32, 32);
  LandmarkSet::Points pts{};
  int filled = 0;
  auto flush = [&](int n) {
    const auto p = LandmarkPositions(LandmarkSet(pts), 16);
    for (int i = 0; i < n; ++i) {
      const int x = static_cast<int>(pts[i].x), y = static_cast<int>(pts[i].y);
      ASSERT_EQ(p[i], grid[(y / 16) * 32 + x / 16]) << x << "," << y;
    }
  };
  for (int y = 0; y < 512; ++y) {
    for (int x = 0; x < 512; ++x) {
      pts[filled++] = {static_cast<double>(x), static_cast<double>(y)};
      if (filled == 68) {
        flush(68);
        filled = 0;
      }
    }
  }
  flush(filled);
}

TEST(RopeLayout, DefaultsAndValidation) {
  const RopeLayout d;
  EXPECT_EQ(d.head_dim(), 64);
  EXPECT_EQ(RopeLayout::ForHeadDim(64).d_t, 16);
  EXPECT_EQ(RopeLayout::ForHeadDim(64).d_h, 24);
  const RopeLayout six = RopeLayout::ForHeadDim(6);
  EXPECT_EQ(six.d_t + six.d_h + six.d_w, 6);
  EXPECT_EQ(six.d_t, 2);
  RopeLayout odd{3, 24, 24};
  EXPECT_THROW(odd.Validate(), Error);
  RopeLayout flat{16, 24, 24, 1.0};
  EXPECT_THROW(flat.Validate(), Error);
}

TEST(Rope, ZeroPositionIsIdentity) {
  Draws r;
  const auto v = r.Vec(64);
  EXPECT_EQ(ApplyRope(v, {0, 0, 0}, {}), v);
}

TEST(Rope, MatchesPairwiseRotationOracle) {
  Draws r;
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = r.Vec(64);
    const PositionTriple p = r.Pos();
    const auto got = ApplyRope(v, p, {});
    const auto want = RopeOracle(v, p, {});
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Rope, PreservesNormAndInverts) {
  Draws r;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto v = r.Vec(64);
    const PositionTriple p = r.Pos();
    const auto rot = ApplyRope(v, p, {});
    EXPECT_NEAR(Norm(rot), Norm(v), 1e-12 * Norm(v));
    const auto back = ApplyRope(rot, PositionTriple{0, 0, 0} - p, {});
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(back[i], v[i], 1e-12);
  }
}

TEST(Rope, LogitsDependOnlyOnRelativePosition) {
  Draws r;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto q = r.Vec(64), k = r.Vec(64);
    const PositionTriple p1 = r.Pos(), p2 = r.Pos();
    const double lhs = Dot(ApplyRope(q, p1, {}), ApplyRope(k, p2, {}));
    const double rhs = Dot(ApplyRope(q, p1 - p2, {}), k);
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}

TEST(Rope, LengthMismatchIsAShapeError) {
  std::vector<double> v(63, 1.0);
  try {
    ApplyRope(v, {1, 2, 3}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Posenc, JsonShape) {
  EXPECT_EQ(ToJson(PositionTriple{1, 2, 3}).dump(), "[1,2,3]");
}

}  // namespace
}  // namespace lato::posenc
