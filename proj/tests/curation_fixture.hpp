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

#ifndef LATO_TESTS_CURATION_FIXTURE_HPP_
#define LATO_TESTS_CURATION_FIXTURE_HPP_

// A 100-record manifest whose stage outcomes are fixed by construction:
//   quality    100 enter, 50 pass (20 centroid, 15 area, 10 blur, 5 aesthetic)
//   diversity   50 enter, 30 pass (10 static, 5 outlier, 5 semantic)
//   identity    30 enter, 24 pass (6 below 0.9)
//   validation  24 enter, 18 pass (3 wrong rotation, 3 expression rejected)
// Every scorer a record reaches is pinned through mock_scores.

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "lato/image.hpp"
#include "lato/kinematics.hpp"
#include "lato/landmarks.hpp"

namespace lato::testing {

struct CurationFixture {
  std::vector<std::string> lines;  // JSONL, one record per entry
  std::array<std::uint64_t, 4> entered{100, 50, 30, 24};
  std::array<std::uint64_t, 4> passed{50, 30, 24, 18};
  std::uint64_t accepted = 18;
};

inline GrayImage Checker(int size, int cell, int low, int high) {
  GrayImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) img.at(x, y) = static_cast<std::uint8_t>(((x / cell + y / cell) % 2) ? high : low);
  }
  return img;
}

inline LandmarkSet ScaleAbout(const LandmarkSet& f, double s) {
  const Point c = f.Centroid();
  LandmarkSet::Points pts;
  for (std::size_t i = 0; i < LandmarkSet::kNumPoints; ++i) pts[i] = {c.x + s * (f[i].x - c.x), c.y + s * (f[i].y - c.y)};
  return LandmarkSet(pts, f.canvas());
}

inline CurationFixture BuildCurationFixture(const std::string& dir) {
  const std::string sharp = dir + "/sharp.pgm", flat = dir + "/flat.pgm";
  WritePgm(sharp, Checker(64, 2, 28, 228));
  WritePgm(flat, GrayImage(64, 64, 128));

  const LandmarkSet face = kinematics::CanonicalFace3D::Default().Projection();
  const LandmarkSet turned = kinematics::ApplyRigidRotation(face, 30, 0).Translated(-12, 0);
  const std::string left = "turn his/her head 30 degrees to the left";

  struct Design {
    LandmarkSet src, tgt;
    std::string image;
    std::map<std::string, double> scores;
    std::string instruction;  // empty: generated from the pose delta
    std::string expression;
  };
  std::vector<Design> designs;
  auto add = [&](int n, Design d) {
    for (int i = 0; i < n; ++i) designs.push_back(d);
  };
  const std::map<std::string, double> good{{"aesthetic", 0.8}, {"semantic", 0.7}, {"identity", 0.95}, {"expression", 0.9}};
  auto with = [&](const std::string& kind, double v) {
    auto s = good;
    s[kind] = v;
    return s;
  };
  const LandmarkSet shifted = face.Translated(30, 30);

  // Stage 1 failures.
  add(20, {face.Translated(-200, 0), shifted, sharp, good, left, ""});
  add(15, {ScaleAbout(face, 0.7), shifted, sharp, good, left, ""});
  add(10, {face, shifted, flat, good, left, ""});
  add(5, {face, shifted, sharp, with("aesthetic", 0.3), left, ""});
  // Stage 2 failures.
  add(10, {face, face, sharp, good, left, ""});
  add(5, {face, face.Translated(130, 130), sharp, good, left, ""});
  add(5, {face, shifted, sharp, with("semantic", 0.2), left, ""});
  // Stage 3 failures.
  add(6, {face, turned, sharp, with("identity", 0.85), left, ""});
  // Stage 4: five stated and five generated pose instructions pass, three
  // instructions contradict the rotation, eight expression edits pass and
  // three are rejected by the validator.
  add(5, {face, turned, sharp, good, left, ""});
  add(5, {face, turned, sharp, good, "", ""});
  add(3, {face, turned, sharp, good, "turn his/her head 30 degrees to the right", ""});
  add(8, {face, shifted, sharp, good, "make her facial expression happy strongly", "happy"});
  add(3, {face, shifted, sharp, with("expression", 0.2), "make her facial expression sad", "sad"});

  std::shuffle(designs.begin(), designs.end(), std::mt19937_64(20261019));
  CurationFixture out;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const Design& d = designs[i];
    char id[16];
    std::snprintf(id, sizeof(id), "pair-%03zu", i);
    nlohmann::json j{{"id", id},
                     {"source_image", d.image},
                     {"target_image", d.image},
                     {"source_landmarks", nlohmann::json::parse(SerializeLandmarks(d.src))},
                     {"target_landmarks", nlohmann::json::parse(SerializeLandmarks(d.tgt))},
                     {"mock_scores", d.scores}};
    if (!d.instruction.empty()) j["instruction"] = d.instruction;
    if (!d.expression.empty()) j["expression"] = {{"type", d.expression}};
    out.lines.push_back(j.dump());
  }
  return out;
}

inline std::string JoinLines(const std::vector<std::string>& lines, std::size_t begin, std::size_t end) {
  std::string s;
  for (std::size_t i = begin; i < end; ++i) s += lines[i] + "\n";
  return s;
}

}  // namespace lato::testing

#endif  // LATO_TESTS_CURATION_FIXTURE_HPP_
