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
#include "lato/landmarks.hpp"
#include "support.hpp"

namespace lato {
namespace {

using testing::SampleSource;
using testing::Fixture;
using testing::ReadFile;

LandmarkSet Shifted(const LandmarkSet& f, double dx, double dy) { return f.Translated(dx, dy); }

template <typename Fn>
ErrorKind KindOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no lato::Error thrown";
  return ErrorKind::kConfig;
}

TEST(Landmarks, SampleDocumentRoundTripsByteForByte) {
  const std::string text = ReadFile(Fixture("sample_source.json"));
  const LandmarkSet f = ParseLandmarks(text);
  EXPECT_EQ(SerializeLandmarks(f) + "\n", text);
  EXPECT_EQ(f[0], (Point{160, 198}));
  EXPECT_EQ(f[33], (Point{246, 264}));
  EXPECT_EQ(f[67], (Point{236, 291}));
}

TEST(Landmarks, FractionalCoordinatesRoundTrip) {
  LandmarkSet::Points pts{};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 511);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const LandmarkSet f(pts);
  EXPECT_EQ(ParseLandmarks(SerializeLandmarks(f)), f);
}

TEST(Landmarks, SchemaErrorsNameTheRegion) {
  std::string text = ReadFile(Fixture("sample_source.json"));
  text.replace(text.find("[[250, 202], "), 13, "[");  // NOSE loses a point
  try {
    ParseLandmarks(text);
    FAIL() << "expected a schema error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
    EXPECT_NE(std::string(e.what()).find("NOSE"), std::string::npos) << e.what();
  }
  EXPECT_EQ(KindOf([] { ParseLandmarks("{\"JAW/BROWS\": []}"); }), ErrorKind::kSchema);
  EXPECT_EQ(KindOf([] { ParseLandmarks("not json"); }), ErrorKind::kSchema);
}

TEST(Landmarks, NonFiniteCoordinatesAreRejected) {
  LandmarkSet::Points pts{};
  pts[3].x = std::nan("");
  EXPECT_EQ(KindOf([&] { LandmarkSet f(pts); }), ErrorKind::kRange);
}

TEST(Landmarks, ClampAndBounds) {
  const LandmarkSet f = SampleSource().Translated(400, -300);
  EXPECT_FALSE(f.InsideCanvas());
  const LandmarkSet c = f.Clamped();
  EXPECT_TRUE(c.InsideCanvas());
  for (const Point& p : c.points()) {
    EXPECT_GE(p.x, 0);
    EXPECT_LE(p.x, 511);
    EXPECT_GE(p.y, 0);
    EXPECT_LE(p.y, 511);
  }
}

TEST(Landmarks, RegionMeans) {
  const LandmarkSet f = SampleSource();
  double sx = 0, sy = 0;
  for (int i = 36; i <= 41; ++i) {
    sx += f[i].x;
    sy += f[i].y;
  }
  const Point m = f.Mean(regions::kLeftEye);
  EXPECT_DOUBLE_EQ(m.x, sx / 6);
  EXPECT_DOUBLE_EQ(m.y, sy / 6);
  EXPECT_EQ(regions::kInner.size(), 32);
  EXPECT_EQ(regions::kJaw.size() + regions::kBrows.size() + regions::kNose.size() +
                regions::kEyes.size() + regions::kMouth.size(),
            68);
}

TEST(Landmarks, InterocularDistanceMatchesHandComputation) {
  const LandmarkSet f = SampleSource();
  // Left eye 36-41 and right eye 42-47 means from the sample document.
  const double lx = (191 + 202 + 212 + 226 + 215 + 202) / 6.0;
  const double ly = (198 + 195 + 195 + 202 + 205 + 202) / 6.0;
  const double rx = (274 + 284 + 298 + 305 + 298 + 284) / 6.0;
  const double ry = (202 + 198 + 198 + 202 + 205 + 205) / 6.0;
  EXPECT_NEAR(InterocularDistance(f), std::hypot(rx - lx, ry - ly), 1e-12);
}

TEST(Landmarks, DegenerateInterocularDistance) {
  LandmarkSet::Points pts{};
  for (auto& p : pts) p = {100, 100};
  EXPECT_EQ(KindOf([&] { InterocularDistance(LandmarkSet(pts)); }), ErrorKind::kDegenerate);
}

TEST(ChangeScore, IdenticalSetsScoreZero) {
  const LandmarkSet f = SampleSource();
  const ChangeScore c = ComputeChangeScore(f, f);
  EXPECT_EQ(c.score, 0.0);
  EXPECT_EQ(c.inner_diff, 0.0);
  EXPECT_EQ(c.overall_diff, 0.0);
}

TEST(ChangeScore, UniformShiftClosedForm) {
  const LandmarkSet f = SampleSource();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-40, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const double dx = u(rng), dy = u(rng);
    const ChangeScore c = ComputeChangeScore(f, Shifted(f, dx, dy));
    const double expected = (std::fabs(dx) + std::fabs(dy)) / 2.0;
    EXPECT_NEAR(c.inner_diff, expected, 1e-12);
    EXPECT_NEAR(c.overall_diff, expected, 1e-12);
    EXPECT_NEAR(c.score, expected, 1e-12);
  }
}

TEST(ChangeScore, WeightsInnerAndOverall) {
  // Move only the mouth: inner sees 20 of 32 points, overall 20 of 68.
  const LandmarkSet f = SampleSource();
  LandmarkSet::Points pts;
  for (int i = 0; i < 68; ++i) pts[i] = f[i];
  for (int i = 48; i <= 67; ++i) pts[i].y += 10;
  const ChangeScore c = ComputeChangeScore(f, LandmarkSet(pts));
  const double inner = 20 * 10.0 / 64;
  const double overall = 20 * 10.0 / 136;
  EXPECT_NEAR(c.inner_diff, inner, 1e-12);
  EXPECT_NEAR(c.overall_diff, overall, 1e-12);
  EXPECT_NEAR(c.score, 0.7 * inner + 0.3 * overall, 1e-12);
}

TEST(ChangeScore, SymmetricAndNonNegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 511);
  for (int trial = 0; trial < 100; ++trial) {
    LandmarkSet::Points a{}, b{};
    for (int i = 0; i < 68; ++i) {
      a[i] = {u(rng), u(rng)};
      b[i] = {u(rng), u(rng)};
    }
    const double ab = ComputeChangeScore(LandmarkSet(a), LandmarkSet(b)).score;
    EXPECT_GE(ab, 0.0);
    EXPECT_DOUBLE_EQ(ab, ComputeChangeScore(LandmarkSet(b), LandmarkSet(a)).score);
  }
}

TEST(ChangeScore, CanvasMismatchIsAUnitError) {
  const LandmarkSet f = SampleSource();
  LandmarkSet::Points pts;
  for (int i = 0; i < 68; ++i) pts[i] = f[i];
  const LandmarkSet g(pts, Canvas{1024, 1024});
  EXPECT_EQ(KindOf([&] { ComputeChangeScore(f, g); }), ErrorKind::kUnit);
  EXPECT_EQ(KindOf([&] { LandmarkL1Error(f, g); }), ErrorKind::kUnit);
}

TEST(ChangeScore, NormalizedByInterocularDistance) {
  const LandmarkSet f = SampleSource();
  const LandmarkSet g = Shifted(f, 10, 0);
  EXPECT_NEAR(NormalizedChangeScore(f, g), 5.0 / InterocularDistance(f), 1e-12);
}

TEST(LandmarkL1, MeanAbsoluteCoordinateDifference) {
  const LandmarkSet f = SampleSource();
  EXPECT_NEAR(LandmarkL1Error(Shifted(f, 3, -1), f), 2.0, 1e-12);
}

}  // namespace
}  // namespace lato
