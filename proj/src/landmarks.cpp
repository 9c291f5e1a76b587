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

#include "lato/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "format.hpp"
#include "json.hpp"
#include "lato/error.hpp"

namespace lato {
namespace {

struct JsonGroup {
  const char* key;
  IndexRange range;
};

constexpr std::array<JsonGroup, 4> kGroups = {{
    {"JAW/BROWS", {0, 26}},
    {"NOSE", regions::kNose},
    {"EYES", regions::kEyes},
    {"MOUTH", regions::kMouth},
}};

void RequireSameCanvas(const LandmarkSet& a, const LandmarkSet& b) {
  if (a.canvas() != b.canvas()) {
    throw Error(ErrorKind::kUnit, "landmark sets live on different canvases");
  }
}

}  // namespace

std::string_view ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kDegenerate: return "degenerate-geometry";
    case ErrorKind::kUnit: return "unit";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kSanity: return "sanity";
    case ErrorKind::kScorer: return "scorer";
  }
  return "unknown";
}

LandmarkSet::LandmarkSet(const Points& points, Canvas canvas)
    : points_(points), canvas_(canvas) {
  if (canvas.width <= 0 || canvas.height <= 0) {
    throw Error(ErrorKind::kRange, "canvas dimensions must be positive");
  }
  for (std::size_t i = 0; i < kNumPoints; ++i) {
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
      throw Error(ErrorKind::kRange, "landmark " + std::to_string(i) + " is not finite");
    }
  }
}

Point LandmarkSet::Centroid() const { return Mean({0, kNumPoints - 1}); }

Point LandmarkSet::Mean(IndexRange range) const {
  Point m;
  for (int i = range.first; i <= range.last; ++i) {
    m.x += points_[i].x;
    m.y += points_[i].y;
  }
  m.x /= range.size();
  m.y /= range.size();
  return m;
}

LandmarkSet LandmarkSet::Clamped() const {
  Points out = points_;
  const double max_x = canvas_.width - 1;
  const double max_y = canvas_.height - 1;
  for (auto& p : out) {
    p.x = std::clamp(p.x, 0.0, max_x);
    p.y = std::clamp(p.y, 0.0, max_y);
  }
  return LandmarkSet(out, canvas_);
}

LandmarkSet LandmarkSet::Translated(double dx, double dy) const {
  Points out = points_;
  for (auto& p : out) {
    p.x += dx;
    p.y += dy;
  }
  return LandmarkSet(out, canvas_);
}

bool LandmarkSet::InsideCanvas() const {
  return std::all_of(points_.begin(), points_.end(), [&](const Point& p) {
    return p.x >= 0 && p.y >= 0 && p.x < canvas_.width && p.y < canvas_.height;
  });
}

LandmarkSet ParseLandmarks(std::string_view json_text, Canvas canvas) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kSchema, std::string("landmark JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorKind::kSchema, "landmark JSON: top level must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    const bool known = std::any_of(kGroups.begin(), kGroups.end(),
                                   [&](const JsonGroup& g) { return key == g.key; });
    if (!known) throw Error(ErrorKind::kSchema, "landmark JSON: unexpected region \"" + key + "\"");
  }

  LandmarkSet::Points points{};
  for (const auto& group : kGroups) {
    const std::string region = group.key;
    auto it = doc.find(region);
    if (it == doc.end()) {
      throw Error(ErrorKind::kSchema, "landmark JSON: missing region \"" + region + "\"");
    }
    if (!it->is_array() || it->size() != static_cast<std::size_t>(group.range.size())) {
      throw Error(ErrorKind::kSchema, "landmark JSON: region \"" + region + "\" must hold " +
                                          std::to_string(group.range.size()) + " points");
    }
    for (int k = 0; k < group.range.size(); ++k) {
      const auto& pair = (*it)[k];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        throw Error(ErrorKind::kSchema, "landmark JSON: region \"" + region + "\" entry " +
                                            std::to_string(k) + " is not an [X, Y] number pair");
      }
      points[group.range.first + k] = {pair[0].get<double>(), pair[1].get<double>()};
    }
  }
  return LandmarkSet(points, canvas);
}

std::string SerializeLandmarks(const LandmarkSet& landmarks) {
  std::string out = "{";
  for (std::size_t g = 0; g < kGroups.size(); ++g) {
    if (g) out += ", ";
    out += '"';
    out += kGroups[g].key;
    out += "\": [";
    for (int i = kGroups[g].range.first; i <= kGroups[g].range.last; ++i) {
      if (i != kGroups[g].range.first) out += ", ";
      out += '[' + internal::FormatNumber(landmarks[i].x) + ", " +
             internal::FormatNumber(landmarks[i].y) + ']';
    }
    out += ']';
  }
  out += '}';
  return out;
}

LandmarkSet ReadLandmarksFile(const std::string& path, Canvas canvas) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open landmark file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseLandmarks(ss.str(), canvas);
}

void WriteLandmarksFile(const std::string& path, const LandmarkSet& landmarks) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write landmark file " + path);
  out << SerializeLandmarks(landmarks) << '\n';
}

double InterocularDistance(const LandmarkSet& f) {
  const Point left = f.Mean(regions::kLeftEye);
  const Point right = f.Mean(regions::kRightEye);
  const double d = std::hypot(right.x - left.x, right.y - left.y);
  if (!(d > 1e-9)) {
    throw Error(ErrorKind::kDegenerate, "eye centres coincide; inter-ocular distance is zero");
  }
  return d;
}

ChangeScore ComputeChangeScore(const LandmarkSet& a, const LandmarkSet& b) {
  RequireSameCanvas(a, b);
  double inner = 0.0;
  double overall = 0.0;
  for (std::size_t i = 0; i < LandmarkSet::kNumPoints; ++i) {
    const double d = std::fabs(a[i].x - b[i].x) + std::fabs(a[i].y - b[i].y);
    overall += d;
    if (regions::kInner.contains(static_cast<int>(i))) inner += d;
  }
  ChangeScore s;
  s.inner_diff = inner / (2.0 * regions::kInner.size());
  s.overall_diff = overall / (2.0 * LandmarkSet::kNumPoints);
  s.score = 0.7 * s.inner_diff + 0.3 * s.overall_diff;
  return s;
}

double NormalizedChangeScore(const LandmarkSet& a, const LandmarkSet& b) {
  return ComputeChangeScore(a, b).score / InterocularDistance(a);
}

double LandmarkL1Error(const LandmarkSet& pred, const LandmarkSet& target) {
  RequireSameCanvas(pred, target);
  double sum = 0.0;
  for (std::size_t i = 0; i < LandmarkSet::kNumPoints; ++i) {
    sum += std::fabs(pred[i].x - target[i].x) + std::fabs(pred[i].y - target[i].y);
  }
  return sum / (2.0 * LandmarkSet::kNumPoints);
}

}  // namespace lato
