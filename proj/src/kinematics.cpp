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

#include "lato/kinematics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "assets.hpp"
#include "format.hpp"
#include "lato/checksum.hpp"
#include "lato/error.hpp"

namespace lato::kinematics {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kN = static_cast<int>(LandmarkSet::kNumPoints);

std::size_t ExpressionIndex(ExpressionType t) { return static_cast<std::size_t>(t); }

Eigen::Vector3d Centroid(const CanonicalFace3D::Points& pts) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) c += p;
  return c / kN;
}

std::string Fixed(double v, int digits = 1) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

struct NamedRange {
  const char* name;
  IndexRange range;
};

constexpr NamedRange kTraceRegions[] = {
    {"jaw", regions::kJaw},       {"brows", regions::kBrows},
    {"nose", regions::kNose},     {"left_eye", regions::kLeftEye},
    {"right_eye", regions::kRightEye}, {"mouth", regions::kMouth},
};

}  // namespace

double PoseDeviation(const HeadPose& estimated, const HeadPose& target) {
  return std::hypot(estimated.pitch - target.pitch, estimated.yaw - target.yaw);
}

Eigen::Matrix3d RotationMatrix(double pitch_deg, double yaw_deg, double roll_deg) {
  const double p = pitch_deg * kDeg, y = yaw_deg * kDeg, r = roll_deg * kDeg;
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, std::cos(p), -std::sin(p), 0, std::sin(p), std::cos(p);
  ry << std::cos(y), 0, -std::sin(y), 0, 1, 0, std::sin(y), 0, std::cos(y);
  rz << std::cos(r), -std::sin(r), 0, std::sin(r), std::cos(r), 0, 0, 0, 1;
  return rx * ry * rz;
}

CanonicalFace3D CanonicalFace3D::FromJson(std::string_view json_text) {
  CanonicalFace3D face;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    face.schema_version_ = doc.at("schema_version").get<int>();
    if (face.schema_version_ != 1) {
      throw Error(ErrorKind::kSchema, "face template: unsupported schema version");
    }
    const auto& canvas = doc.at("canvas");
    face.canvas_ = {canvas.at(0).get<int>(), canvas.at(1).get<int>()};
    const auto& pts = doc.at("points");
    const auto& mirror = doc.at("mirror");
    if (pts.size() != LandmarkSet::kNumPoints || mirror.size() != LandmarkSet::kNumPoints) {
      throw Error(ErrorKind::kSchema, "face template: expected 68 points");
    }
    for (int i = 0; i < kN; ++i) {
      face.points_[i] = {pts[i].at(0).get<double>(), pts[i].at(1).get<double>(),
                         pts[i].at(2).get<double>()};
      face.mirror_[i] = mirror[i].get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("face template: ") + e.what());
  }
  face.hash_ = Crc32Hex(json_text);
  return face;
}

const CanonicalFace3D& CanonicalFace3D::Default() {
  static const CanonicalFace3D face = FromJson(assets::CanonicalFaceJson());
  return face;
}

LandmarkSet CanonicalFace3D::Projection() const {
  LandmarkSet::Points pts;
  for (int i = 0; i < kN; ++i) pts[i] = {points_[i].x(), points_[i].y()};
  return LandmarkSet(pts, canvas_);
}

ExpressionFields ExpressionFields::FromJson(std::string_view json_text) {
  ExpressionFields out;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    if (doc.at("schema_version").get<int>() != 1) {
      throw Error(ErrorKind::kSchema, "expression fields: unsupported schema version");
    }
    const auto& mult = doc.at("intensity");
    for (Intensity i : kAllIntensities) {
      out.multipliers_[static_cast<std::size_t>(i)] = mult.at(std::string(ToString(i))).get<double>();
    }
    const auto& fields = doc.at("fields");
    for (ExpressionType t : kAllExpressions) {
      Field f{};
      for (const auto& entry : fields.at(std::string(ToString(t)))) {
        const int idx = entry.at(0).get<int>();
        if (idx < 0 || idx >= kN) throw Error(ErrorKind::kSchema, "expression fields: bad index");
        f[idx] = {entry.at(1).get<double>(), entry.at(2).get<double>()};
      }
      out.fields_[ExpressionIndex(t)] = f;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("expression fields: ") + e.what());
  }
  out.hash_ = Crc32Hex(json_text);
  return out;
}

const ExpressionFields& ExpressionFields::Default() {
  static const ExpressionFields fields = FromJson(assets::ExpressionFieldsJson());
  return fields;
}

const ExpressionFields::Field& ExpressionFields::field(ExpressionType type) const {
  return fields_[ExpressionIndex(type)];
}

double ExpressionFields::multiplier(Intensity intensity) const {
  return multipliers_[static_cast<std::size_t>(intensity)];
}

PoseFit FitPose(const LandmarkSet& f, const CanonicalFace3D& face) {
  const Eigen::Vector3d t_mean = Centroid(face.points());
  const Point f_mean = f.Centroid();

  Eigen::Matrix<double, 2, 3> a = Eigen::Matrix<double, 2, 3>::Zero();
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (int i = 0; i < kN; ++i) {
    const Eigen::Vector3d x3 = face.points()[i] - t_mean;
    const Eigen::Vector2d x2(f[i].x - f_mean.x, f[i].y - f_mean.y);
    a += x2 * x3.transpose();
    b += x3 * x3.transpose();
  }
  const Eigen::Matrix<double, 2, 3> m = a * b.inverse();

  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector2d sv = svd.singularValues();
  if (!(sv(0) > 1e-9) || sv(1) < 1e-3 * sv(0)) {
    throw Error(ErrorKind::kDegenerate, "pose fit is rank deficient (collinear landmarks)");
  }
  const Eigen::Matrix<double, 2, 3> rows =
      svd.matrixU() * svd.matrixV().leftCols<2>().transpose();

  PoseFit fit;
  fit.rotation.row(0) = rows.row(0);
  fit.rotation.row(1) = rows.row(1);
  fit.rotation.row(2) = rows.row(0).cross(rows.row(1));
  fit.scale = 0.5 * (sv(0) + sv(1));

  const Eigen::Matrix3d& r = fit.rotation;
  fit.pose.yaw = std::asin(std::clamp(-r(0, 2), -1.0, 1.0)) / kDeg;
  fit.pose.pitch = std::atan2(-r(1, 2), r(2, 2)) / kDeg;
  fit.roll = std::atan2(-r(0, 1), r(0, 0)) / kDeg;

  double sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const Eigen::Vector2d pred = m * (face.points()[i] - t_mean);
    sq += (Eigen::Vector2d(f[i].x - f_mean.x, f[i].y - f_mean.y) - pred).squaredNorm();
  }
  fit.rms_residual = std::sqrt(sq / kN);
  return fit;
}

HeadPose EstimatePose(const LandmarkSet& f, const CanonicalFace3D& face) {
  return FitPose(f, face).pose;
}

LiftedFace Lift(const LandmarkSet& f, const CanonicalFace3D& face) {
  const PoseFit fit = FitPose(f, face);
  const Eigen::Vector3d t_mean = Centroid(face.points());
  LiftedFace out;
  out.canvas = f.canvas();
  for (int i = 0; i < kN; ++i) {
    const double z = fit.scale * fit.rotation.row(2).dot(face.points()[i] - t_mean);
    out.points[i] = {f[i].x, f[i].y, z};
  }
  const Point c = f.Centroid();
  out.pivot = Eigen::Vector3d(c.x, c.y, 0.0) -
              fit.scale * kHeadPivotDepth * fit.rotation.col(2);
  return out;
}

LiftedFace Rotate(const LiftedFace& face, double dyaw, double dpitch) {
  if (!std::isfinite(dyaw) || !std::isfinite(dpitch) || std::fabs(dyaw) > kMaxRigidRotation ||
      std::fabs(dpitch) > kMaxRigidRotation) {
    throw Error(ErrorKind::kRange, "rigid rotation is limited to 60 degrees per axis");
  }
  const Eigen::Matrix3d r = RotationMatrix(dpitch, dyaw);
  LiftedFace out = face;
  for (int i = 0; i < kN; ++i) {
    out.points[i] = face.pivot + r * (face.points[i] - face.pivot);
  }
  return out;
}

LandmarkSet Project(const LiftedFace& face) {
  LandmarkSet::Points pts;
  for (int i = 0; i < kN; ++i) pts[i] = {face.points[i].x(), face.points[i].y()};
  return LandmarkSet(pts, face.canvas).Clamped();
}

LandmarkSet ApplyRigidRotation(const LandmarkSet& f, double dyaw, double dpitch) {
  if (dyaw == 0.0 && dpitch == 0.0) return f;
  return Project(Rotate(Lift(f), dyaw, dpitch));
}

LandmarkSet ApplyExpression(const LandmarkSet& f, ExpressionType type, Intensity intensity,
                            const ExpressionFields& fields) {
  if (type == ExpressionType::kNeutral) return f;
  static const double template_iod =
      InterocularDistance(CanonicalFace3D::Default().Projection());
  const double gain = fields.multiplier(intensity) * InterocularDistance(f) / template_iod;
  const auto& field = fields.field(type);
  LandmarkSet::Points pts;
  for (int i = 0; i < kN; ++i) {
    pts[i] = {f[i].x + gain * field[i].x, f[i].y + gain * field[i].y};
  }
  return LandmarkSet(pts, f.canvas());
}

SanityReport SanityCheckDetailed(const LandmarkSet& src, const LandmarkSet& pred) {
  SanityReport report{pred.Clamped()};

  LiftedFace src3d, pred3d;
  try {
    src3d = Lift(src);
    pred3d = Lift(report.landmarks);
  } catch (const Error& e) {
    throw Error(ErrorKind::kSanity, std::string("sanity check could not lift landmarks: ") +
                                        e.what());
  }
  std::vector<double> ratios;
  for (int i = regions::kNoseBridge.first; i <= regions::kNoseBridge.last; ++i) {
    for (int j = i + 1; j <= regions::kNoseBridge.last; ++j) {
      const double ds = (src3d.points[i] - src3d.points[j]).norm();
      const double dp = (pred3d.points[i] - pred3d.points[j]).norm();
      if (ds > 1e-9) ratios.push_back(dp / ds);
    }
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const std::size_t n = ratios.size();
    report.bridge_ratio =
        n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  }
  if (std::fabs(report.bridge_ratio - 1.0) > kRigidRatioTolerance && report.bridge_ratio > 0.0) {
    const Point c = report.landmarks.Centroid();
    const double k = 1.0 / report.bridge_ratio;
    LandmarkSet::Points pts;
    for (int i = 0; i < kN; ++i) {
      pts[i] = {c.x + k * (report.landmarks[i].x - c.x), c.y + k * (report.landmarks[i].y - c.y)};
    }
    report.landmarks = LandmarkSet(pts, pred.canvas()).Clamped();
    report.rescaled = true;
  }

  const auto& out = report.landmarks;
  for (int i = regions::kNoseBridge.first; i < regions::kNoseBridge.last; ++i) {
    if (!(out[i].y < out[i + 1].y)) {
      throw Error(ErrorKind::kSanity, "nose bridge is not monotone in y at point " +
                                          std::to_string(i) + " (y=" + Fixed(out[i].y) +
                                          ", next y=" + Fixed(out[i + 1].y) + ")");
    }
  }
  const Point left = out.Mean(regions::kLeftEye);
  const Point right = out.Mean(regions::kRightEye);
  if (!(left.x < right.x)) {
    throw Error(ErrorKind::kSanity, "eyes crossed: left-eye centre x=" + Fixed(left.x) +
                                        " is not left of right-eye centre x=" + Fixed(right.x));
  }
  return report;
}

LandmarkSet SanityCheck(const LandmarkSet& src, const LandmarkSet& pred) {
  return SanityCheckDetailed(src, pred).landmarks;
}

Prediction PredictLandmarks(const LandmarkSet& f, const EditInstruction& instruction,
                            const SmoothingHook& smoothing) {
  Validate(instruction);
  ReasoningTrace trace;

  // Stage 1.
  trace.initial_pose = EstimatePose(f);
  trace.initial_expression = "neutral";
  trace.initial_text = "Current pose: pitch " + Fixed(trace.initial_pose.pitch) + " deg, yaw " +
                       Fixed(trace.initial_pose.yaw) + " deg. Current expression assumed " +
                       trace.initial_expression + ". Inter-ocular distance " +
                       Fixed(InterocularDistance(f)) + " px on a " +
                       std::to_string(f.canvas().width) + "x" +
                       std::to_string(f.canvas().height) + " canvas.";

  // Stage 2.
  trace.instruction = instruction;
  const double dyaw = instruction.YawDegrees();
  const double dpitch = instruction.PitchDegrees();
  for (const auto& r : instruction.rotations) {
    trace.actions.push_back("rigid " + std::string(ToString(r.axis)) + " rotation of " +
                            std::to_string(r.degrees) + " deg");
  }
  if (instruction.expression && instruction.expression->type != ExpressionType::kNeutral) {
    trace.actions.push_back("non-rigid " + std::string(ToString(instruction.expression->type)) +
                            " deformation, " +
                            std::string(ToString(instruction.expression->intensity)));
  }
  trace.decomposition_text =
      trace.actions.empty() ? "No geometric change requested."
                            : "Primary actions: " + [&] {
                                std::string s;
                                for (std::size_t i = 0; i < trace.actions.size(); ++i) {
                                  if (i) s += "; ";
                                  s += trace.actions[i];
                                }
                                return s;
                              }() + ".";

  // Stage 3: rigid motion first, then the expression field.
  const LandmarkSet rotated = ApplyRigidRotation(f, dyaw, dpitch);
  LandmarkSet composed = rotated;
  if (instruction.expression) {
    composed = ApplyExpression(rotated, instruction.expression->type,
                               instruction.expression->intensity);
  }
  for (const auto& [name, range] : kTraceRegions) {
    RegionMotion m;
    m.region = name;
    for (int i = range.first; i <= range.last; ++i) {
      m.rigid.x += rotated[i].x - f[i].x;
      m.rigid.y += rotated[i].y - f[i].y;
      m.non_rigid.x += composed[i].x - rotated[i].x;
      m.non_rigid.y += composed[i].y - rotated[i].y;
      m.max_shift = std::max(m.max_shift, std::hypot(composed[i].x - f[i].x, composed[i].y - f[i].y));
    }
    m.rigid = {m.rigid.x / range.size(), m.rigid.y / range.size()};
    m.non_rigid = {m.non_rigid.x / range.size(), m.non_rigid.y / range.size()};
    trace.regions.push_back(m);
  }
  {
    std::string s;
    for (const auto& m : trace.regions) {
      if (!s.empty()) s += " ";
      s += m.region + ": rigid (" + Fixed(m.rigid.x) + ", " + Fixed(m.rigid.y) +
           "), non-rigid (" + Fixed(m.non_rigid.x) + ", " + Fixed(m.non_rigid.y) +
           "), max " + Fixed(m.max_shift) + " px.";
    }
    trace.kinematic_text = s;
  }

  // Stage 4.
  const LandmarkSet smoothed = smoothing ? smoothing(composed) : composed;
  const SanityReport report = SanityCheckDetailed(f, smoothed);
  trace.landmarks = report.landmarks;
  trace.bridge_ratio = report.bridge_ratio;
  trace.rescaled = report.rescaled;
  trace.coordinate_text = "Nose-bridge length ratio " + Fixed(report.bridge_ratio, 3) +
                          (report.rescaled ? "; prediction rescaled about its centroid." : ".") +
                          " Final coordinates clamped to the canvas.";
  return {report.landmarks, std::move(trace)};
}

nlohmann::json ToJson(const ReasoningTrace& t) {
  using nlohmann::json;
  json regions_json = json::array();
  for (const auto& m : t.regions) {
    regions_json.push_back({{"region", m.region},
                            {"rigid", {m.rigid.x, m.rigid.y}},
                            {"non_rigid", {m.non_rigid.x, m.non_rigid.y}},
                            {"max_shift", m.max_shift}});
  }
  json stages = json::array();
  stages.push_back({{"stage", "initial_state"},
                    {"title", "Step 1: Initial State Analysis"},
                    {"text", t.initial_text},
                    {"payload",
                     {{"pose", {{"pitch", t.initial_pose.pitch}, {"yaw", t.initial_pose.yaw}}},
                      {"expression", t.initial_expression}}}});
  stages.push_back({{"stage", "decomposition"},
                    {"title", "Step 2: Instruction Decomposition and Kinematic Analysis"},
                    {"text", t.decomposition_text},
                    {"payload",
                     {{"instruction", lato::ToJson(t.instruction)}, {"actions", t.actions}}}});
  stages.push_back({{"stage", "kinematic_chain"},
                    {"title", "Step 3: Quantitative Transformation Estimation"},
                    {"text", t.kinematic_text},
                    {"payload", {{"regions", regions_json}}}});
  stages.push_back({{"stage", "coordinate_estimation"},
                    {"title", "Step 4: Coordinate Estimation"},
                    {"text", t.coordinate_text},
                    {"payload",
                     {{"landmarks", json::parse(SerializeLandmarks(t.landmarks))},
                      {"bridge_ratio", t.bridge_ratio},
                      {"rescaled", t.rescaled}}}});
  return {{"schema_version", 1}, {"stages", stages}};
}

std::vector<SyntheticFace> GenerateSyntheticFaces(std::size_t count, std::uint64_t seed,
                                                  const SyntheticFaceConfig& config) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> yaw_dist(-config.max_yaw, config.max_yaw);
  std::uniform_real_distribution<double> pitch_dist(-config.max_pitch, config.max_pitch);
  std::uniform_int_distribution<int> expr_dist(0, static_cast<int>(std::size(kAllExpressions)) - 1);
  std::uniform_int_distribution<int> intensity_dist(0, 2);

  const CanonicalFace3D& face = CanonicalFace3D::Default();
  const LiftedFace base = Lift(face.Projection(), face);
  std::vector<SyntheticFace> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    SyntheticFace s;
    s.pose.yaw = yaw_dist(rng);
    s.pose.pitch = pitch_dist(rng);
    s.expression = kAllExpressions[expr_dist(rng)];
    s.intensity = kAllIntensities[intensity_dist(rng)];
    const LandmarkSet rotated = Project(Rotate(base, s.pose.yaw, s.pose.pitch));
    s.landmarks = ApplyExpression(rotated, s.expression, s.intensity).Clamped();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LandmarkSet> GenerateSyntheticLandmarks(std::size_t count, std::uint64_t seed,
                                                    const SyntheticFaceConfig& config) {
  std::vector<LandmarkSet> out;
  out.reserve(count);
  for (auto& s : GenerateSyntheticFaces(count, seed, config)) out.push_back(std::move(s.landmarks));
  return out;
}

}  // namespace lato::kinematics
