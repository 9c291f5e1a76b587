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

#ifndef LATO_KINEMATICS_HPP_
#define LATO_KINEMATICS_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lato/instruction.hpp"
#include "lato/landmarks.hpp"

// Rule-based landmark predictor. Coordinates follow the image convention:
// +x right, +y down, +z toward the camera. Rotations are
//   R = Rx(pitch) * Ry(yaw) * Rz(roll)
// with Ry(yaw) moving points in front of the pivot toward -x for positive yaw
// ("left") and Rx(pitch) moving them toward -y for positive pitch ("up").
namespace lato::kinematics {

struct HeadPose {
  double pitch = 0.0;  // degrees
  double yaw = 0.0;    // degrees

  friend bool operator==(const HeadPose&, const HeadPose&) = default;
};

// Euclidean norm of the per-axis differences, degrees.
double PoseDeviation(const HeadPose& estimated, const HeadPose& target);

Eigen::Matrix3d RotationMatrix(double pitch_deg, double yaw_deg, double roll_deg = 0.0);

// 68-point 3D template on the 512 canvas, Z in pixels (+ toward the camera).
class CanonicalFace3D {
 public:
  using Points = std::array<Eigen::Vector3d, LandmarkSet::kNumPoints>;

  // Parses the versioned asset document. Throws Error(kSchema).
  static CanonicalFace3D FromJson(std::string_view json_text);
  // The embedded assets/canonical_face_v1.json, parsed once.
  static const CanonicalFace3D& Default();

  const Points& points() const { return points_; }
  const Canvas& canvas() const { return canvas_; }
  int schema_version() const { return schema_version_; }
  // Index of each point's bilateral partner.
  const std::array<int, LandmarkSet::kNumPoints>& mirror() const { return mirror_; }
  // CRC-32 of the asset text.
  const std::string& hash() const { return hash_; }

  // Orthographic projection (drop Z).
  LandmarkSet Projection() const;

 private:
  Points points_{};
  std::array<int, LandmarkSet::kNumPoints> mirror_{};
  Canvas canvas_{};
  int schema_version_ = 0;
  std::string hash_;
};

// Per-expression displacement fields defined on the template at "normally".
class ExpressionFields {
 public:
  using Field = std::array<Point, LandmarkSet::kNumPoints>;

  static ExpressionFields FromJson(std::string_view json_text);
  static const ExpressionFields& Default();

  const Field& field(ExpressionType type) const;
  double multiplier(Intensity intensity) const;
  const std::string& hash() const { return hash_; }

 private:
  std::array<Field, std::size(kAllExpressions)> fields_{};
  std::array<double, 3> multipliers_{0.5, 1.0, 1.5};
  std::string hash_;
};

// Weak-perspective fit of the template to a landmark set.
struct PoseFit {
  HeadPose pose;
  double roll = 0.0;            // degrees, reported only
  double scale = 1.0;           // image px per template px
  Eigen::Matrix3d rotation;     // template frame -> image frame
  double rms_residual = 0.0;    // px
};

// Least-squares 2x3 projection, orthonormalised, completed by a cross
// product. Throws Error(kDegenerate) on a rank-deficient fit.
PoseFit FitPose(const LandmarkSet& f, const CanonicalFace3D& face = CanonicalFace3D::Default());
HeadPose EstimatePose(const LandmarkSet& f, const CanonicalFace3D& face = CanonicalFace3D::Default());

// Landmarks lifted to 3D with the pose-aligned template depth, plus the
// head-fixed rotation pivot (behind the face). Rotations leave the pivot in
// place, so successive rotations compose exactly.
struct LiftedFace {
  CanonicalFace3D::Points points{};
  Eigen::Vector3d pivot = Eigen::Vector3d::Zero();
  Canvas canvas{};
};

// Depth of the head rotation centre behind the landmark centroid, template px.
inline constexpr double kHeadPivotDepth = 90.0;
inline constexpr double kMaxRigidRotation = 60.0;

LiftedFace Lift(const LandmarkSet& f, const CanonicalFace3D& face = CanonicalFace3D::Default());
// Rx(dpitch) * Ry(dyaw) about the pivot. Throws Error(kRange) beyond 60 degrees.
LiftedFace Rotate(const LiftedFace& face, double dyaw, double dpitch);
// Orthographic projection, clamped to the canvas.
LandmarkSet Project(const LiftedFace& face);

LandmarkSet ApplyRigidRotation(const LandmarkSet& f, double dyaw, double dpitch);

// Adds the expression field scaled by the intensity multiplier and by the
// ratio of inter-ocular distances (f vs. template). Neutral is the identity.
LandmarkSet ApplyExpression(const LandmarkSet& f, ExpressionType type, Intensity intensity,
                            const ExpressionFields& fields = ExpressionFields::Default());

struct SanityReport {
  LandmarkSet landmarks;
  double bridge_ratio = 1.0;  // median nose-bridge length ratio before correction
  bool rescaled = false;
};

inline constexpr double kRigidRatioTolerance = 0.35;

// Clamps, then compares nose-bridge (27-30) pairwise lengths between source
// and prediction in the lifted 3D frame; a median ratio off by more than 35%
// is undone by rescaling the prediction about its centroid. Throws
// Error(kSanity) when the bridge is not monotone in y or the eyes cross.
SanityReport SanityCheckDetailed(const LandmarkSet& src, const LandmarkSet& pred);
LandmarkSet SanityCheck(const LandmarkSet& src, const LandmarkSet& pred);

struct RegionMotion {
  std::string region;
  Point rigid;      // mean displacement from the head rotation
  Point non_rigid;  // mean displacement from the expression field
  double max_shift = 0.0;

  friend bool operator==(const RegionMotion&, const RegionMotion&) = default;
};

struct ReasoningTrace {
  // Stage 1: initial state analysis.
  HeadPose initial_pose;
  std::string initial_expression;
  std::string initial_text;
  // Stage 2: instruction decomposition.
  EditInstruction instruction;
  std::vector<std::string> actions;
  std::string decomposition_text;
  // Stage 3: kinematic chain.
  std::vector<RegionMotion> regions;
  std::string kinematic_text;
  // Stage 4: coordinate estimation.
  LandmarkSet landmarks;
  double bridge_ratio = 1.0;
  bool rescaled = false;
  std::string coordinate_text;

  friend bool operator==(const ReasoningTrace&, const ReasoningTrace&) = default;
};

nlohmann::json ToJson(const ReasoningTrace& trace);

struct Prediction {
  LandmarkSet landmarks;
  ReasoningTrace trace;
};

// Hook between composition and the sanity checks. The default is a no-op.
using SmoothingHook = std::function<LandmarkSet(const LandmarkSet&)>;

Prediction PredictLandmarks(const LandmarkSet& f, const EditInstruction& instruction,
                            const SmoothingHook& smoothing = {});

struct SyntheticFaceConfig {
  double max_yaw = 30.0;
  double max_pitch = 30.0;
};

struct SyntheticFace {
  LandmarkSet landmarks;
  HeadPose pose;
  ExpressionType expression = ExpressionType::kNeutral;
  Intensity intensity = Intensity::kNormally;
};

// Template rotated by a uniform random (yaw, pitch) and deformed by a random
// expression and intensity. Deterministic in the seed.
std::vector<SyntheticFace> GenerateSyntheticFaces(std::size_t count, std::uint64_t seed,
                                                  const SyntheticFaceConfig& config = {});
std::vector<LandmarkSet> GenerateSyntheticLandmarks(std::size_t count, std::uint64_t seed,
                                                    const SyntheticFaceConfig& config = {});

}  // namespace lato::kinematics

#endif  // LATO_KINEMATICS_HPP_
